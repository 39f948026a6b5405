//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use momentkit::extension::{trunc_monomial_limit, ExtendedFunctional};
use momentkit::lp::{Relation, Sense};
use momentkit::{
    extend, hamburger_check, integrate, lp_solve, recover_measure, sos_decompose, verify_certificate,
    verify_moments, Builtin, FunctionSpec, LinearProgram, LpOutcome, MomentSequence, Pick, Polynomial,
    SandwichConfig, SosOutcome,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Verdict {
            pass,
            summary: summary.into(),
            notes: Vec::new(),
        }
    }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + criterion)
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

// ---------------------------------------------------------------- oracles

/// `sum_i w_i x_i^k` by repeated multiplication.
fn oracle_moments(atoms: &[(f64, f64)], m: usize) -> Vec<f64> {
    (0..=m)
        .map(|k| {
            atoms
                .iter()
                .map(|&(x, w)| {
                    let mut p = 1.0;
                    for _ in 0..k {
                        p *= x;
                    }
                    w * p
                })
                .sum()
        })
        .collect()
}

fn random_atoms(rng: &mut ChaCha8Rng, max_atoms: usize, min_gap: f64) -> Vec<(f64, f64)> {
    loop {
        let n = rng.gen_range(1..=max_atoms);
        let mut atoms: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(-5.0..=5.0), rng.gen_range(0.1..=2.0)))
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).all(|w| w[1].0 - w[0].0 >= min_gap) {
            return atoms;
        }
    }
}

/// `c^T H c` with `H_ij = s_{i+j}`.
fn hankel_form(s: &[f64], c: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, ci) in c.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            acc += ci * cj * s[i + j];
        }
    }
    acc
}

/// Monic polynomial with the given roots, ascending coefficients.
fn monic_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (j, &cj) in c.iter().enumerate() {
            next[j + 1] += cj;
            next[j] -= r * cj;
        }
        c = next;
    }
    c
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &cj| acc * x + cj)
}

/// `max_j |a_j - b_j| / max(max_j |a_j|, tiny)`.
fn rel_coeff_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    let get = |v: &[f64], j: usize| v.get(j).copied().unwrap_or(0.0);
    let scale = (0..n).map(|j| get(a, j).abs()).fold(f64::MIN_POSITIVE, f64::max);
    (0..n).map(|j| (get(a, j) - get(b, j)).abs()).fold(0.0, f64::max) / scale
}

// ------------------------------------------------------------ criterion 1

fn hamburger_forward() -> Verdict {
    let mut rng = rng(1);
    let start = Instant::now();
    let mut ok = 0;
    for _ in 0..200 {
        let atoms = random_atoms(&mut rng, 5, 0.0);
        let s = MomentSequence::new(oracle_moments(&atoms, 10)).unwrap();
        if hamburger_check(&s, 1e-9).is_psd {
            ok += 1;
        }
    }
    let t = start.elapsed();
    Verdict::new(
        ok == 200 && within(t, 5.0),
        format!("{ok}/200 moment sequences accepted in {:.3} s", t.as_secs_f64()),
    )
}

// ------------------------------------------------------------ criterion 2

/// With `n <= 5` atoms the 6x6 Hankel matrix has the kernel polynomial
/// `c(x) = x^j prod (x - x_l)`, whose top coefficient is 1 at index
/// `i = n + j`. Lowering `s_{2i}` by `eps` gives `c^T H' c = -eps`, so any
/// `eps > tol * max(1, trace(H)) * |c|^2` forces `lambda_min < -tol * lambda_max`.
fn hamburger_converse() -> Verdict {
    let tol = 1e-9;
    let mut rng = rng(2);
    let start = Instant::now();
    let mut ok = 0;
    let mut certified = 0;
    for _ in 0..200 {
        let atoms = random_atoms(&mut rng, 5, 0.0);
        let n = atoms.len();
        let j = rng.gen_range(0..=5 - n);
        let mut roots: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        roots.extend(std::iter::repeat(0.0).take(j));
        let kernel = monic_from_roots(&roots);
        let i = n + j;

        let mut s = oracle_moments(&atoms, 10);
        let trace: f64 = (0..=5).map(|d| s[2 * d]).sum();
        let norm2: f64 = kernel.iter().map(|c| c * c).sum();
        let margin = tol * trace.max(1.0) * norm2;
        let eps = margin * rng.gen_range(2.0..10.0);
        s[2 * i] -= eps;

        let mut padded = kernel.clone();
        padded.resize(6, 0.0);
        if hankel_form(&s, &padded) < -margin {
            certified += 1;
        }
        let Ok(seq) = MomentSequence::new(s.clone()) else {
            continue;
        };
        let verdict = hamburger_check(&seq, tol);
        if let (false, Some(w)) = (verdict.is_psd, verdict.witness.as_ref()) {
            if hankel_form(&s, w) < 0.0 {
                ok += 1;
            }
        }
    }
    let t = start.elapsed();
    Verdict::new(
        ok == 200 && certified == 200 && within(t, 5.0),
        format!(
            "{ok}/200 perturbations rejected with c^T H c < 0 ({certified}/200 oracle-certified) in {:.3} s",
            t.as_secs_f64()
        ),
    )
}

// ------------------------------------------------------------ criterion 3

fn random_coeffs(rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<f64> {
    let d = rng.gen_range(0..=max_degree);
    (0..=d).map(|_| rng.gen_range(-3.0..=3.0)).collect()
}

fn sos_completeness() -> Verdict {
    let mut rng = rng(3);
    let start = Instant::now();
    let mut certs = 0;
    let mut worst = 0.0f64;
    let mut trials = 0;
    while trials < 500 {
        let p = random_coeffs(&mut rng, 6);
        let q = random_coeffs(&mut rng, 6);
        let mut f = convolve(&p, &p);
        let q2 = convolve(&q, &q);
        if f.len() < q2.len() {
            f.resize(q2.len(), 0.0);
        }
        for (j, v) in q2.iter().enumerate() {
            f[j] += v;
        }
        let fp = Polynomial::new(f.clone());
        if fp.is_zero() {
            continue;
        }
        trials += 1;
        if let Ok(SosOutcome::Certificate(c)) = sos_decompose(&fp) {
            let mut sum = convolve(c.p.coeffs(), c.p.coeffs());
            let q2 = convolve(c.q.coeffs(), c.q.coeffs());
            if sum.len() < q2.len() {
                sum.resize(q2.len(), 0.0);
            }
            for (j, v) in q2.iter().enumerate() {
                sum[j] += v;
            }
            let resid = rel_coeff_distance(&f, &sum);
            worst = worst.max(resid);
            if verify_certificate(&fp, &c, 1e-7) && resid <= 1e-7 {
                certs += 1;
            }
        }
    }

    let mut witnesses = 0;
    for t in 0..100 {
        let f: Vec<f64> = if t % 2 == 0 {
            let d = 2 * rng.gen_range(0..=3) + 1;
            let mut c: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..=3.0)).collect();
            let lead: f64 = rng.gen_range(0.5..=3.0);
            c.push(if rng.gen_bool(0.5) { lead } else { -lead });
            c
        } else {
            let p = random_coeffs(&mut rng, 6);
            let mut f: Vec<f64> = convolve(&p, &p).iter().map(|v| -v).collect();
            f[0] -= rng.gen_range(0.01..=1.0);
            f
        };
        if let Ok(SosOutcome::Witness(w)) = sos_decompose(&Polynomial::new(f.clone())) {
            if horner(&f, w.x0) < 0.0 {
                witnesses += 1;
            }
        }
    }
    let t = start.elapsed();
    Verdict::new(
        certs == 500 && witnesses == 100 && within(t, 10.0),
        format!(
            "{certs}/500 certificates (worst residual {worst:.1e}), {witnesses}/100 witnesses in {:.3} s",
            t.as_secs_f64()
        ),
    )
}

// ------------------------------------------------------------ criterion 4

const MIN_NODE_GAP: f64 = 0.5;

fn roundtrip_error(atoms: &[(f64, f64)]) -> f64 {
    let s = MomentSequence::new(oracle_moments(atoms, 2 * atoms.len())).unwrap();
    match recover_measure(&s) {
        Ok(mu) if mu.len() == atoms.len() => mu
            .atoms()
            .iter()
            .zip(atoms)
            .map(|(a, &(x, w))| (a.node - x).abs().max((a.weight - w).abs()))
            .fold(0.0, f64::max),
        _ => f64::INFINITY,
    }
}

fn measure_roundtrip() -> Verdict {
    let mut rng = rng(4);
    let start = Instant::now();
    let mut matched = 0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let atoms = random_atoms(&mut rng, 6, MIN_NODE_GAP);
        let err = roundtrip_error(&atoms);
        worst = worst.max(err);
        if err <= 1e-6 {
            matched += 1;
        }
    }

    let mut exact_low = 0;
    let mut fails_at_2n = 0;
    for _ in 0..100 {
        let atoms = loop {
            let a = random_atoms(&mut rng, 6, 0.0);
            if a.len() >= 2 {
                break a;
            }
        };
        let big_n = rng.gen_range(1..atoms.len());
        let full = oracle_moments(&atoms, 2 * big_n);
        let s_full = MomentSequence::new(full.clone()).unwrap();
        let s_trunc = MomentSequence::new(full[..2 * big_n].to_vec()).unwrap();
        let Ok(mu) = recover_measure(&s_trunc) else {
            continue;
        };
        let report = verify_moments(&mu, &s_full, 2 * big_n, 1e-8);
        let low_ok = report.checks[..2 * big_n].iter().all(|c| c.pass);
        let independent_low_ok = (0..2 * big_n).all(|k| {
            let actual: f64 = mu.atoms().iter().map(|a| a.weight * a.node.powi(k as i32)).sum();
            let abs: f64 = mu.atoms().iter().map(|a| a.weight * a.node.abs().powi(k as i32)).sum();
            (actual - full[k]).abs() <= 1e-8 * abs.max(full[k].abs()).max(1.0)
        });
        if low_ok && independent_low_ok && mu.len() == big_n {
            exact_low += 1;
        }
        if !report.checks[2 * big_n].pass {
            fails_at_2n += 1;
        }
    }

    // Same draw without the separation rule, reported for information only.
    let mut free_rng = rng;
    let free_ok = (0..100)
        .filter(|_| roundtrip_error(&random_atoms(&mut free_rng, 6, 0.0)) <= 1e-6)
        .count();

    let t = start.elapsed();
    let mut v = Verdict::new(
        matched == 100 && exact_low == 100 && fails_at_2n >= 95,
        format!(
            "{matched}/100 measures recovered within 1e-6 (worst {worst:.1e}, node gap >= {MIN_NODE_GAP}); \
             exact below 2N {exact_low}/100; fails at 2N {fails_at_2n}/100; {:.3} s",
            t.as_secs_f64()
        ),
    );
    v.notes.push(format!(
        "info: without node separation {free_ok}/100 recovered within 1e-6 (f64 moments are ill-conditioned for near-coincident atoms)"
    ));
    v
}

// ------------------------------------------------------------ criterion 5

const GAUSSIAN: [f64; 7] = [1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0];

fn test_functions() -> Vec<(&'static str, FunctionSpec)> {
    vec![
        ("abs", FunctionSpec::builtin(Builtin::Abs, -4.0, 4.0).unwrap()),
        ("gaussian_bump", FunctionSpec::builtin(Builtin::GaussianBump, -4.0, 4.0).unwrap()),
        (
            "trunc_monomial(2,2)",
            FunctionSpec::builtin(Builtin::TruncMonomial { n: 2, k: 2 }, -4.0, 4.0).unwrap(),
        ),
    ]
}

/// Three-point Gauss-Hermite rule for the standard normal weight.
fn hermite_integral(g: &FunctionSpec) -> f64 {
    let r = 3f64.sqrt();
    2.0 / 3.0 * g.eval(0.0).unwrap() + (g.eval(-r).unwrap() + g.eval(r).unwrap()) / 6.0
}

fn sandwich() -> Verdict {
    let s = MomentSequence::new(GAUSSIAN.to_vec()).unwrap();
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    let mu = recover_measure(&s).unwrap();
    for (name, g) in test_functions() {
        let oracle = hermite_integral(&g);
        let integral = integrate(&mu, &g).unwrap();
        let mut widths = Vec::new();
        let mut last = None;
        for degree in [0, 2, 4] {
            match extend(&s, &g, &SandwichConfig::new(degree, 201)) {
                Ok(r) => {
                    widths.push(r.width());
                    last = Some(r);
                }
                Err(e) => {
                    pass = false;
                    parts.push(format!("{name}: degree {degree} failed: {e}"));
                }
            }
        }
        let Some(r) = last else { continue };
        let brackets = r.lower <= integral && integral <= r.upper + 1e-8;
        let oracle_agrees = (integral - oracle).abs() <= 1e-12;
        let monotone = widths.windows(2).all(|w| w[1] <= w[0] + 1e-9);
        let nonneg = r.e >= 0.0;
        pass &= brackets && oracle_agrees && monotone && nonneg;
        parts.push(format!(
            "{name}: [{:.6}, {:.6}] ∋ {:.6} (lower - integral {:.1e}, integral - upper {:.1e}, oracle gap {:.1e}), widths {:?}",
            r.lower,
            r.upper,
            integral,
            r.lower - integral,
            integral - r.upper,
            (integral - oracle).abs(),
            widths.iter().map(|w| format!("{w:.4}")).collect::<Vec<_>>()
        ));
    }
    let t = start.elapsed();
    let mut v = Verdict::new(pass && within(t, 10.0), format!("3 functions in {:.3} s", t.as_secs_f64()));
    v.notes = parts;
    v
}

// ------------------------------------------------------------ criterion 6

fn positivity() -> Verdict {
    let s = MomentSequence::new(GAUSSIAN.to_vec()).unwrap();
    let degree = 4;
    let mut rng = rng(6);
    let mut worst = f64::INFINITY;
    let mut ok = [0usize; 3];
    let funcs = test_functions();
    let setups: Vec<_> = funcs
        .iter()
        .map(|(_, g)| {
            let r = extend(&s, g, &SandwichConfig::new(degree, 201).pick(Pick::Lower)).unwrap();
            let values: Vec<f64> = r.grid.iter().map(|&x| g.eval(x).unwrap()).collect();
            (ExtendedFunctional::from_sandwich(s.clone(), g.clone(), &r), r.grid, values)
        })
        .collect();

    for (case, slot) in ok.iter_mut().enumerate() {
        for t in 0..300 {
            let (ext, grid, gv) = &setups[t % setups.len()];
            let d = match case {
                0 => 0.0,
                1 => rng.gen_range(0.1..=3.0),
                _ => -rng.gen_range(0.1..=3.0),
            };
            let deg = rng.gen_range(0..=degree);
            // h(x) = sum a_j (x/4)^j stays O(1) on [-4, 4].
            let mut h: Vec<f64> = (0..=deg)
                .map(|j| rng.gen_range(-1.0..=1.0) / 4f64.powi(j as i32))
                .collect();
            let min = grid
                .iter()
                .zip(gv)
                .map(|(&x, &gx)| horner(&h, x) + d * gx)
                .fold(f64::INFINITY, f64::min);
            // Half the trials touch zero on the grid, the rest keep some slack.
            let slack = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..=0.5) };
            h[0] += slack - min;
            let value = ext.apply(&Polynomial::new(h), d).unwrap();
            worst = worst.min(value);
            if value >= -1e-7 {
                *slot += 1;
            }
        }
    }
    Verdict::new(
        ok.iter().all(|&c| c == 300),
        format!(
            "d = 0: {}/300, d > 0: {}/300, d < 0: {}/300 (min value {worst:.2e})",
            ok[0], ok[1], ok[2]
        ),
    )
}

// ------------------------------------------------------------ criterion 7

fn truncated_monomial_limit() -> Verdict {
    let s = MomentSequence::new(vec![1.0, 0.0, 1.0, 0.0]).unwrap();
    let ks: Vec<u32> = (1..=8).collect();
    let values = trunc_monomial_limit(&s, 2, &ks).unwrap();
    // Atoms +-1 with weight 1/2 each: 0.5 * 1 + 0.5 * 1.
    let direct = 0.5 * 1.0 + 0.5 * 1.0;
    let exact = values.iter().all(|&v| v == direct) && direct == 1.0;
    Verdict::new(exact, format!("k = 1..8 -> {values:?}"))
}

// ------------------------------------------------------------ criterion 8

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

struct Hyperplane {
    a: Vec<f64>,
    b: f64,
}

/// Solves the square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn feasible(lp: &LinearProgram, x: &[f64], bigm: f64) -> bool {
    let tol = 1e-9;
    x.iter().all(|v| v.abs() <= bigm * (1.0 + tol))
        && x.iter().enumerate().all(|(j, &v)| v >= lp.lower[j] - tol && v <= lp.upper[j] + tol)
        && lp.constraints.iter().all(|c| {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let slack = tol * (1.0 + c.rhs.abs());
            match c.relation {
                Relation::Le => lhs <= c.rhs + slack,
                Relation::Ge => lhs >= c.rhs - slack,
                Relation::Eq => (lhs - c.rhs).abs() <= slack,
            }
        })
}

/// Best objective over all vertices of the feasible set clipped to the box
/// `|x_j| <= bigm`.
fn vertex_optimum(lp: &LinearProgram, bigm: f64) -> Option<f64> {
    let n = lp.objective.len();
    let mut planes: Vec<Hyperplane> = lp
        .constraints
        .iter()
        .map(|c| Hyperplane {
            a: c.coeffs.clone(),
            b: c.rhs,
        })
        .collect();
    for j in 0..n {
        let unit = |v: f64| {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            Hyperplane { a, b: v }
        };
        for v in [lp.lower[j], lp.upper[j], -bigm, bigm] {
            if v.is_finite() {
                planes.push(unit(v));
            }
        }
    }
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].a.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| planes[i].b).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(lp, &x, bigm) {
                let v: f64 = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
                best = Some(match (best, lp.sense) {
                    (None, _) => v,
                    (Some(b), Sense::Maximize) => b.max(v),
                    (Some(b), Sense::Minimize) => b.min(v),
                });
            }
        }
        // Next n-combination of plane indices.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < planes.len() - n + i {
                idx[i] += 1;
                for k in i + 1..n {
                    idx[k] = idx[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn brute_force(lp: &LinearProgram) -> Status {
    let (Some(small), Some(large)) = (vertex_optimum(lp, 1e6), vertex_optimum(lp, 1e7)) else {
        return Status::Infeasible;
    };
    if (large - small).abs() > 1e-6 * (1.0 + small.abs()) {
        Status::Unbounded
    } else {
        Status::Optimal(small)
    }
}

/// Integer data. Most instances are built around a planted point `x*` so
/// that optimal and unbounded outcomes are common; the rest use random
/// right-hand sides and are mostly infeasible.
fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=3);
    let int = |rng: &mut ChaCha8Rng, lo: i32, hi: i32| rng.gen_range(lo..=hi) as f64;
    let planted = rng.gen_bool(0.8);
    let star: Vec<f64> = (0..n).map(|_| int(rng, -3, 3)).collect();
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let objective = (0..n).map(|_| int(rng, -5, 5)).collect();
    let mut lp = LinearProgram::new(sense, objective);
    for j in 0..n {
        match rng.gen_range(0..3) {
            0 => {}
            1 if !planted || star[j] >= 0.0 => lp.set_bounds(j, 0.0, f64::INFINITY),
            _ => {
                let lo = if planted { star[j] - int(rng, 0, 3) } else { int(rng, -4, 2) };
                lp.set_bounds(j, lo, lo + int(rng, 0, 6).max(if planted { star[j] - lo } else { 0.0 }));
            }
        }
    }
    for _ in 0..rng.gen_range(0..=8) {
        let a: Vec<f64> = (0..n).map(|_| int(rng, -5, 5)).collect();
        let ax: f64 = a.iter().zip(&star).map(|(a, x)| a * x).sum();
        let (rel, rhs) = match rng.gen_range(0..7) {
            0..=2 => (Relation::Le, if planted { ax + int(rng, 0, 3) } else { int(rng, -10, 10) }),
            3..=5 => (Relation::Ge, if planted { ax - int(rng, 0, 3) } else { int(rng, -10, 10) }),
            _ => (Relation::Eq, if planted { ax } else { int(rng, -10, 10) }),
        };
        lp.add_constraint(a, rel, rhs);
    }
    lp
}

fn lp_oracle() -> Verdict {
    let mut rng = rng(8);
    let mut agree = 0;
    let mut counts = [0usize; 3];
    let mut mismatches = Vec::new();
    for t in 0..200 {
        let lp = random_lp(&mut rng);
        let expected = brute_force(&lp);
        let got = match lp_solve(&lp) {
            Ok(LpOutcome::Optimal(sol)) => Status::Optimal(sol.optimum),
            Ok(LpOutcome::Infeasible) => Status::Infeasible,
            Ok(LpOutcome::Unbounded) => Status::Unbounded,
            Err(e) => {
                mismatches.push(format!("trial {t}: solver error {e}"));
                continue;
            }
        };
        let same = match (expected, got) {
            (Status::Optimal(a), Status::Optimal(b)) => (a - b).abs() <= 1e-9 * a.abs().max(1.0),
            (a, b) => a == b,
        };
        counts[match expected {
            Status::Optimal(_) => 0,
            Status::Infeasible => 1,
            Status::Unbounded => 2,
        }] += 1;
        if same {
            agree += 1;
        } else {
            mismatches.push(format!("trial {t}: oracle {expected:?}, simplex {got:?}"));
        }
    }
    let mut v = Verdict::new(
        agree == 200,
        format!(
            "{agree}/200 agree with vertex enumeration ({} optimal, {} infeasible, {} unbounded)",
            counts[0], counts[1], counts[2]
        ),
    );
    v.notes = mismatches;
    v
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("hamburger forward", hamburger_forward),
        ("hamburger converse witness", hamburger_converse),
        ("two-square completeness", sos_completeness),
        ("measure roundtrip and Gauss exactness", measure_roundtrip),
        ("sandwich brackets the integral", sandwich),
        ("positivity preservation", positivity),
        ("truncated monomial limit", truncated_monomial_limit),
        ("LP oracle equivalence", lp_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("[{}] {} {}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, name, v.summary);
        for note in &v.notes {
            println!("       {note}");
        }
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
