//! Dense two-phase tableau simplex for small linear programs with general
//! bounds. Dantzig pricing, switching to Bland's rule once the method has
//! stalled on degenerate pivots.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_LP_TOL: f64 = 1e-8;
/// Degenerate pivots tolerated before switching to Bland's rule.
pub const BLAND_AFTER_DEGENERATE: usize = 200;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `sense c^T x` subject to the rows and `lower <= x <= upper` (infinite
/// bounds allowed; the default is a free variable).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// All variables free, no constraints.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Same box on every variable.
    pub fn with_box(mut self, lower: f64, upper: f64) -> Self {
        self.lower.iter_mut().for_each(|l| *l = lower);
        self.upper.iter_mut().for_each(|u| *u = upper);
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Dimension("bounds length differs from objective".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Dimension(format!(
                    "row {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
                return Err(LpError::NonFinite);
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] == f64::INFINITY
                || self.upper[j] == f64::NEG_INFINITY
            {
                return Err(LpError::NonFinite);
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub optimum: f64,
    pub solution: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            LpOutcome::Optimal(_) => "optimal",
            LpOutcome::Infeasible => "infeasible",
            LpOutcome::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("inconsistent LP dimensions: {0}")]
    Dimension(String),
    #[error("LP data contains non-finite values")]
    NonFinite,
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
}

/// How an original variable maps onto non-negative standard columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lower + y`
    Shift { lower: f64, col: usize },
    /// `x = upper - y`
    Reflect { upper: f64, col: usize },
    /// `x = y+ - y-`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    ncols: usize,
    pivots: usize,
    degenerate: usize,
    bland: bool,
    limit: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        self.rows[r][c] = 1.0;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.rows[i][c] = 0.0;
            self.rhs[i] -= f * prhs;
            if self.rhs[i] < 0.0 && self.rhs[i] > -FEAS_TOL {
                self.rhs[i] = 0.0;
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[c] = true;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Maximizes `cost . x` over the columns flagged in `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<Phase, LpError> {
        let cost_scale = cost.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let tol = COST_TOL * cost_scale;
        loop {
            if self.pivots > self.limit {
                return Err(LpError::IterationLimit(self.limit));
            }
            // reduced costs d_j = c_j - c_B^T (B^-1 A)_j
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.in_basis[j] {
                    continue;
                }
                let mut d = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    d -= cost[b] * self.rows[i][j];
                }
                if d > tol {
                    if self.bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.map_or(true, |(_, best)| d > best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((c, _)) = entering else {
                return Ok(Phase::Optimal);
            };

            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i].max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            let better = if tie {
                                if self.bland {
                                    self.basis[i] < self.basis[bi]
                                } else {
                                    a > self.rows[bi][c]
                                }
                            } else {
                                ratio < br
                            };
                            if better {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = best else {
                return Ok(Phase::Unbounded);
            };
            if ratio <= FEAS_TOL {
                self.degenerate += 1;
                if self.degenerate > BLAND_AFTER_DEGENERATE {
                    self.bland = true;
                }
            }
            self.pivot(r, c);
        }
    }
}

pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Standard-form columns for the structural variables.
    let mut maps = Vec::with_capacity(n);
    let mut nstd = 0;
    for j in 0..n {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        let map = if l <= 0.0 && u >= 0.0 {
            nstd += 2;
            VarMap::Split {
                pos: nstd - 2,
                neg: nstd - 1,
            }
        } else if l.is_finite() {
            nstd += 1;
            VarMap::Shift { lower: l, col: nstd - 1 }
        } else {
            nstd += 1;
            VarMap::Reflect { upper: u, col: nstd - 1 }
        };
        maps.push(map);
    }

    // Rows over standard columns.
    let mut std_rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    let push_row = |coeffs: &[f64], rel: Relation, rhs: f64, out: &mut Vec<(Vec<f64>, Relation, f64)>| {
        let mut row = vec![0.0; nstd];
        let mut rhs = rhs;
        for (j, &a) in coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { lower, col } => {
                    row[col] += a;
                    rhs -= a * lower;
                }
                VarMap::Reflect { upper, col } => {
                    row[col] -= a;
                    rhs -= a * upper;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        out.push((row, rel, rhs));
    };
    for c in &lp.constraints {
        push_row(&c.coeffs, c.relation, c.rhs, &mut std_rows);
    }
    for j in 0..n {
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        match maps[j] {
            VarMap::Shift { .. } if lp.upper[j].is_finite() => {
                push_row(&unit, Relation::Le, lp.upper[j], &mut std_rows);
            }
            VarMap::Split { .. } => {
                if lp.upper[j].is_finite() {
                    push_row(&unit, Relation::Le, lp.upper[j], &mut std_rows);
                }
                if lp.lower[j].is_finite() {
                    push_row(&unit, Relation::Ge, lp.lower[j], &mut std_rows);
                }
            }
            _ => {}
        }
    }

    // Scale rows, drop empty ones, make rhs non-negative.
    let mut rows = Vec::new();
    for (mut coeffs, mut rel, mut rhs) in std_rows {
        let scale = coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            let ok = match rel {
                Relation::Le => rhs >= -FEAS_TOL,
                Relation::Ge => rhs <= FEAS_TOL,
                Relation::Eq => rhs.abs() <= FEAS_TOL,
            };
            if !ok {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        coeffs.iter_mut().for_each(|v| *v /= scale);
        rhs /= scale;
        if rhs < 0.0 {
            coeffs.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push((coeffs, rel, rhs));
    }

    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let nart = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ncols = nstd + nslack + nart;
    let art_start = nstd + nslack;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        in_basis: vec![false; ncols],
        ncols,
        pivots: 0,
        degenerate: 0,
        bland: false,
        limit: 50 * (m + ncols) + 1000,
    };
    let (mut next_slack, mut next_art) = (nstd, art_start);
    for (coeffs, rel, rhs) in rows {
        let mut row = coeffs;
        row.resize(ncols, 0.0);
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(row);
        tab.rhs.push(rhs);
    }
    for &b in &tab.basis {
        tab.in_basis[b] = true;
    }

    if nart > 0 {
        let mut cost = vec![0.0; ncols];
        cost[art_start..].iter_mut().for_each(|c| *c = -1.0);
        let allowed = vec![true; ncols];
        tab.optimize(&cost, &allowed)?;
        let rhs_scale = tab.rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(&tab.rhs)
            .filter(|(&b, _)| b >= art_start)
            .map(|(_, &v)| v)
            .sum();
        if infeasibility > FEAS_TOL * rhs_scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                let col = (0..art_start)
                    .filter(|&j| !tab.in_basis[j])
                    .max_by(|&a, &b| tab.rows[i][a].abs().total_cmp(&tab.rows[i][b].abs()))
                    .filter(|&j| tab.rows[i][j].abs() > 1e-9);
                match col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.in_basis[tab.basis[i]] = false;
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let sign = match lp.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut cost = vec![0.0; ncols];
    for (j, map) in maps.iter().enumerate() {
        let c = sign * lp.objective[j];
        match *map {
            VarMap::Shift { col, .. } => cost[col] = c,
            VarMap::Reflect { col, .. } => cost[col] = -c,
            VarMap::Split { pos, neg } => {
                cost[pos] = c;
                cost[neg] = -c;
            }
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| j < art_start).collect();
    if let Phase::Unbounded = tab.optimize(&cost, &allowed)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut ystd = vec![0.0; ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        ystd[b] = tab.rhs[i].max(0.0);
    }
    let solution: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { lower, col } => lower + ystd[col],
            VarMap::Reflect { upper, col } => upper - ystd[col],
            VarMap::Split { pos, neg } => ystd[pos] - ystd[neg],
        })
        .collect();
    Ok(LpOutcome::Optimal(LpSolution {
        optimum: lp.objective_value(&solution),
        solution,
        pivots: tab.pivots,
    }))
}
