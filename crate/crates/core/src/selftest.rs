//! Seeded randomized property checks, run by the `selftest` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::extension::{extend, SandwichConfig};
use crate::function::{Builtin, FunctionSpec};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation, Sense};
use crate::measure::{integrate, recover_measure, verify_moments, AtomicMeasure};
use crate::moments::{build_hankel, hamburger_check, MomentSequence};
use crate::poly::Polynomial;
use crate::sos::{sos_decompose, verify_certificate, SosOutcome};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestRow {
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub rows: Vec<SelftestRow>,
    pub all_pass: bool,
}

impl SelftestReport {
    pub fn table(&self) -> String {
        let mut out = format!("{:<28} {:>7} {:>7}  result\n", "property", "passed", "trials");
        for r in &self.rows {
            out.push_str(&format!(
                "{:<28} {:>7} {:>7}  {}\n",
                r.name,
                r.passed,
                r.trials,
                if r.pass { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

type Property = fn(&mut ChaCha8Rng) -> bool;

const PROPERTIES: &[(&str, Property)] = &[
    ("roots_reconstruct", roots_reconstruct),
    ("hamburger_forward", hamburger_forward),
    ("hamburger_converse", hamburger_converse),
    ("sos_certificate", sos_certificate),
    ("sos_witness", sos_witness),
    ("measure_roundtrip", measure_roundtrip),
    ("sandwich_contains_integral", sandwich_contains_integral),
    ("lp_optimum_dominates", lp_optimum_dominates),
];

/// Runs every property `trials` times from `seed`. Each property draws from
/// its own stream, so rows are independent of each other's trial counts.
pub fn run_selftest(seed: u64, trials: usize) -> SelftestReport {
    let rows: Vec<SelftestRow> = PROPERTIES
        .iter()
        .enumerate()
        .map(|(i, (name, prop))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let passed = (0..trials).filter(|_| prop(&mut rng)).count();
            SelftestRow {
                name,
                trials,
                passed,
                pass: passed == trials,
            }
        })
        .collect();
    let all_pass = rows.iter().all(|r| r.pass);
    SelftestReport { seed, rows, all_pass }
}

fn random_atoms(rng: &mut ChaCha8Rng, max_atoms: usize, min_gap: f64) -> Vec<(f64, f64)> {
    loop {
        let n = rng.gen_range(1..=max_atoms);
        let mut atoms: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(0.1..2.0))).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).all(|w| w[1].0 - w[0].0 >= min_gap) {
            return atoms;
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize, bound: f64) -> Polynomial {
    let d = rng.gen_range(0..=max_degree);
    Polynomial::new((0..=d).map(|_| rng.gen_range(-bound..bound)).collect())
}

fn roots_reconstruct(rng: &mut ChaCha8Rng) -> bool {
    let d = rng.gen_range(1..=8);
    let mut coeffs: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
    coeffs.push(rng.gen_range(0.5..3.0));
    let p = Polynomial::new(coeffs);
    match p.roots() {
        Ok(set) => set.roots.len() == d && set.reconstruct().relative_distance(&p) <= 1e-8,
        Err(_) => false,
    }
}

fn hamburger_forward(rng: &mut ChaCha8Rng) -> bool {
    let atoms = random_atoms(rng, 5, 0.0);
    let s = MomentSequence::from_atoms(&atoms, 10).expect("positive mass");
    hamburger_check(&s, 1e-9).is_psd
}

fn hamburger_converse(rng: &mut ChaCha8Rng) -> bool {
    let atoms = random_atoms(rng, 3, 0.0);
    let mut v = MomentSequence::from_atoms(&atoms, 8).expect("positive mass").as_slice().to_vec();
    let n = 4;
    let h = build_hankel(&MomentSequence::new(v.clone()).expect("valid"), n).expect("fits");
    let margin = crate::linalg::symmetric_eigen(h.matrix()).values[0].max(0.0);
    v[2 * n] -= margin + rng.gen_range(0.1..1.0) * (1.0 + v[2 * n].abs());
    let Ok(s) = MomentSequence::new(v) else {
        return false;
    };
    let verdict = hamburger_check(&s, 1e-9);
    match (&verdict.is_psd, &verdict.witness) {
        (false, Some(c)) => build_hankel(&s, n).expect("fits").quadratic_form(c) < 0.0,
        _ => false,
    }
}

fn sos_certificate(rng: &mut ChaCha8Rng) -> bool {
    let p = random_poly(rng, 6, 3.0);
    let q = random_poly(rng, 6, 3.0);
    let f = &p.square() + &q.square();
    if f.is_zero() {
        return true;
    }
    match sos_decompose(&f) {
        Ok(SosOutcome::Certificate(cert)) => verify_certificate(&f, &cert, 1e-7),
        _ => false,
    }
}

fn sos_witness(rng: &mut ChaCha8Rng) -> bool {
    let p = random_poly(rng, 4, 3.0);
    let f = if rng.gen_bool(0.5) {
        let mut c: Vec<f64> = (0..7).map(|_| rng.gen_range(-3.0..3.0)).collect();
        c.push(rng.gen_range(0.5..3.0));
        Polynomial::new(c)
    } else {
        (&p.square() + &Polynomial::constant(rng.gen_range(0.1..2.0))).scale(-1.0)
    };
    match sos_decompose(&f) {
        Ok(SosOutcome::Witness(w)) => f.eval(w.x0) < 0.0,
        _ => false,
    }
}

fn measure_roundtrip(rng: &mut ChaCha8Rng) -> bool {
    let atoms = random_atoms(rng, 6, 0.5);
    let s = MomentSequence::from_atoms(&atoms, 2 * atoms.len()).expect("positive mass");
    let Ok(mu) = recover_measure(&s) else {
        return false;
    };
    mu.len() == atoms.len()
        && mu
            .atoms()
            .iter()
            .zip(&atoms)
            .all(|(a, &(x, w))| (a.node - x).abs() <= 1e-6 && (a.weight - w).abs() <= 1e-6)
        && verify_moments(&mu, &s, 2 * mu.len() - 1, 1e-8).all_pass
}

fn sandwich_contains_integral(rng: &mut ChaCha8Rng) -> bool {
    let atoms: Vec<(f64, f64)> = random_atoms(rng, 3, 0.5)
        .into_iter()
        .map(|(x, w)| (0.6 * x, w))
        .collect();
    let s = MomentSequence::from_atoms(&atoms, 2 * atoms.len()).expect("positive mass");
    let builtin = match rng.gen_range(0..3) {
        0 => Builtin::Abs,
        1 => Builtin::GaussianBump,
        _ => Builtin::Sine,
    };
    let g = FunctionSpec::builtin(builtin, -4.0, 4.0).expect("valid domain");
    let degree = rng.gen_range(0..=s.last_index());
    let Ok(r) = extend(&s, &g, &SandwichConfig::new(degree, 81)) else {
        return false;
    };
    let Ok(mu) = AtomicMeasure::from_pairs(&atoms) else {
        return false;
    };
    let Ok(integral) = integrate(&mu, &g) else {
        return false;
    };
    let slack = 1e-6 * (1.0 + integral.abs());
    r.lower <= integral + slack && integral <= r.upper + slack
}

fn lp_optimum_dominates(rng: &mut ChaCha8Rng) -> bool {
    let n = rng.gen_range(1..=3);
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut lp = LinearProgram::new(Sense::Maximize, objective).with_box(-2.0, 2.0);
    for _ in 0..rng.gen_range(0..=5) {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        lp.add_constraint(a, Relation::Le, rng.gen_range(0.0..1.0));
    }
    // The origin is feasible, so the LP is feasible and (boxed) bounded.
    let Ok(LpOutcome::Optimal(sol)) = lp_solve(&lp) else {
        return false;
    };
    if lp.max_violation(&sol.solution) > 1e-9 {
        return false;
    }
    (0..50).all(|_| {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        lp.max_violation(&x) > 0.0 || lp.objective_value(&x) <= sol.optimum + 1e-9
    })
}
