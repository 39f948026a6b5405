//! Bounded continuous test functions on a closed interval.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionError {
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },
    #[error("invalid function spec: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Constant { c: f64 },
    Abs,
    /// `exp(-x^2)`
    GaussianBump,
    Sine,
    /// `x^n` on `[-k, k]`, zero outside `[-(k+1), k+1]`, linear in between.
    TruncMonomial { n: u32, k: u32 },
    Polynomial(Polynomial),
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Constant { .. } => "constant",
            Builtin::Abs => "abs",
            Builtin::GaussianBump => "gaussian_bump",
            Builtin::Sine => "sine",
            Builtin::TruncMonomial { .. } => "trunc_monomial",
            Builtin::Polynomial(_) => "polynomial",
        }
    }

    /// Defined on all of the real line.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Builtin::Constant { c } => *c,
            Builtin::Abs => x.abs(),
            Builtin::GaussianBump => (-x * x).exp(),
            Builtin::Sine => x.sin(),
            Builtin::TruncMonomial { n, k } => trunc_monomial(*n, *k, x),
            Builtin::Polynomial(p) => p.eval(x),
        }
    }

    fn params(&self) -> Value {
        match self {
            Builtin::Constant { c } => json!({ "c": c }),
            Builtin::TruncMonomial { n, k } => json!({ "n": n, "k": k }),
            Builtin::Polynomial(p) => json!({ "coeffs": p.coeffs() }),
            _ => json!({}),
        }
    }

    fn from_parts(name: &str, params: &Map<String, Value>) -> Result<Self, FunctionError> {
        let num = |key: &str| -> Result<f64, FunctionError> {
            params
                .get(key)
                .and_then(Value::as_f64)
                .ok_or_else(|| FunctionError::Invalid(format!("{name} needs numeric param '{key}'")))
        };
        let int = |key: &str| -> Result<u32, FunctionError> {
            params
                .get(key)
                .and_then(Value::as_u64)
                .and_then(|v| u32::try_from(v).ok())
                .ok_or_else(|| {
                    FunctionError::Invalid(format!("{name} needs non-negative integer param '{key}'"))
                })
        };
        Ok(match name {
            "constant" => Builtin::Constant { c: num("c")? },
            "abs" => Builtin::Abs,
            "gaussian_bump" => Builtin::GaussianBump,
            "sine" => Builtin::Sine,
            "trunc_monomial" => Builtin::TruncMonomial {
                n: int("n")?,
                k: int("k")?,
            },
            "polynomial" => {
                let coeffs: Vec<f64> = params
                    .get("coeffs")
                    .cloned()
                    .map(serde_json::from_value)
                    .transpose()
                    .map_err(|e| FunctionError::Invalid(e.to_string()))?
                    .ok_or_else(|| FunctionError::Invalid("polynomial needs 'coeffs'".into()))?;
                Builtin::Polynomial(
                    Polynomial::try_new(coeffs).map_err(|e| FunctionError::Invalid(e.to_string()))?,
                )
            }
            other => return Err(FunctionError::Invalid(format!("unknown builtin '{other}'"))),
        })
    }
}

/// The truncation family `g_{n,k}`.
pub fn trunc_monomial(n: u32, k: u32, x: f64) -> f64 {
    let k = k as f64;
    let ax = x.abs();
    if ax <= k {
        x.powi(n as i32)
    } else if ax < k + 1.0 {
        let edge = if x > 0.0 { k } else { -k };
        edge.powi(n as i32) * (k + 1.0 - ax)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    Builtin(Builtin),
    /// Piecewise-linear interpolation through `(grid[i], values[i])`.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    domain: (f64, f64),
}

impl FunctionSpec {
    pub fn builtin(builtin: Builtin, lo: f64, hi: f64) -> Result<Self, FunctionError> {
        check_domain(lo, hi)?;
        Ok(FunctionSpec {
            kind: FunctionKind::Builtin(builtin),
            domain: (lo, hi),
        })
    }

    pub fn builtin_by_name(name: &str, params: &Map<String, Value>, lo: f64, hi: f64) -> Result<Self, FunctionError> {
        Self::builtin(Builtin::from_parts(name, params)?, lo, hi)
    }

    /// `x^n` as a builtin polynomial.
    pub fn monomial(n: usize, lo: f64, hi: f64) -> Self {
        Self::builtin(Builtin::Polynomial(Polynomial::monomial(n)), lo, hi).expect("valid domain")
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<f64>, domain: Option<(f64, f64)>) -> Result<Self, FunctionError> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(FunctionError::Invalid(
                "sampled spec needs matching grid/values with at least 2 points".into(),
            ));
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(FunctionError::Invalid("sampled spec has non-finite entries".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FunctionError::Invalid("sampled grid must be strictly increasing".into()));
        }
        let (g0, g1) = (grid[0], grid[grid.len() - 1]);
        let (lo, hi) = domain.unwrap_or((g0, g1));
        check_domain(lo, hi)?;
        if lo < g0 || hi > g1 {
            return Err(FunctionError::Invalid(format!(
                "domain [{lo}, {hi}] extends beyond the sample grid [{g0}, {g1}]"
            )));
        }
        Ok(FunctionSpec {
            kind: FunctionKind::Sampled { grid, values },
            domain: (lo, hi),
        })
    }

    /// Same function on a different domain.
    pub fn with_domain(&self, lo: f64, hi: f64) -> Result<Self, FunctionError> {
        match &self.kind {
            FunctionKind::Builtin(b) => Self::builtin(b.clone(), lo, hi),
            FunctionKind::Sampled { grid, values } => Self::sampled(grid.clone(), values.clone(), Some((lo, hi))),
        }
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 && x <= self.domain.1
    }

    pub fn eval(&self, x: f64) -> Result<f64, FunctionError> {
        if !self.contains(x) {
            return Err(FunctionError::OutsideDomain {
                x,
                lo: self.domain.0,
                hi: self.domain.1,
            });
        }
        Ok(match &self.kind {
            FunctionKind::Builtin(b) => b.eval(x),
            FunctionKind::Sampled { grid, values } => interpolate(grid, values, x),
        })
    }

    /// Knots of a sampled spec that lie inside the domain.
    pub fn knots(&self) -> Vec<f64> {
        match &self.kind {
            FunctionKind::Sampled { grid, .. } => grid.iter().copied().filter(|&x| self.contains(x)).collect(),
            FunctionKind::Builtin(_) => Vec::new(),
        }
    }

    fn to_value(&self) -> Value {
        let domain = json!([self.domain.0, self.domain.1]);
        match &self.kind {
            FunctionKind::Builtin(b) => json!({
                "kind": "builtin",
                "name": b.name(),
                "params": b.params(),
                "domain": domain,
            }),
            FunctionKind::Sampled { grid, values } => json!({
                "kind": "sampled",
                "grid": grid,
                "values": values,
                "domain": domain,
            }),
        }
    }

    fn from_value(v: &Value) -> Result<Self, FunctionError> {
        let obj = v
            .as_object()
            .ok_or_else(|| FunctionError::Invalid("function spec must be an object".into()))?;
        let domain = match obj.get("domain") {
            None => None,
            Some(d) => {
                let pair: Vec<f64> = serde_json::from_value(d.clone())
                    .map_err(|e| FunctionError::Invalid(format!("domain: {e}")))?;
                match pair[..] {
                    [lo, hi] => Some((lo, hi)),
                    _ => return Err(FunctionError::Invalid("domain must be [lo, hi]".into())),
                }
            }
        };
        match obj.get("kind").and_then(Value::as_str) {
            Some("builtin") => {
                let name = obj
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| FunctionError::Invalid("builtin needs 'name'".into()))?;
                let empty = Map::new();
                let params = match obj.get("params") {
                    Some(Value::Object(m)) => m,
                    None | Some(Value::Null) => &empty,
                    Some(_) => return Err(FunctionError::Invalid("'params' must be an object".into())),
                };
                let (lo, hi) = domain.ok_or_else(|| FunctionError::Invalid("builtin needs 'domain'".into()))?;
                Self::builtin_by_name(name, params, lo, hi)
            }
            Some("sampled") => {
                let field = |key: &str| -> Result<Vec<f64>, FunctionError> {
                    let raw = obj
                        .get(key)
                        .ok_or_else(|| FunctionError::Invalid(format!("sampled needs '{key}'")))?;
                    serde_json::from_value(raw.clone()).map_err(|e| FunctionError::Invalid(format!("{key}: {e}")))
                };
                Self::sampled(field("grid")?, field("values")?, domain)
            }
            Some(other) => Err(FunctionError::Invalid(format!("unknown kind '{other}'"))),
            None => Err(FunctionError::Invalid("missing 'kind'".into())),
        }
    }
}

fn check_domain(lo: f64, hi: f64) -> Result<(), FunctionError> {
    if lo.is_finite() && hi.is_finite() && lo <= hi {
        Ok(())
    } else {
        Err(FunctionError::Invalid(format!("bad domain [{lo}, {hi}]")))
    }
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let i = grid.partition_point(|&g| g <= x);
    if i == 0 {
        return values[0];
    }
    if i >= grid.len() {
        return values[values.len() - 1];
    }
    let (x0, x1) = (grid[i - 1], grid[i]);
    let t = (x - x0) / (x1 - x0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

impl Serialize for FunctionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        FunctionSpec::from_value(&v).map_err(D::Error::custom)
    }
}
