//! Problem container and its JSON file format.
//!
//! ```json
//! {
//!   "n": 3, "l": 3,
//!   "convention": "contravariant",
//!   "eta": [["0","0","1"], ["0","1","0"], ["1","0","0"]],
//!   "mu": {"scale_of_eta": "1"},
//!   "phi": {"terms": [{"exps": [2,0,1], "coeff": "1/2"}]},
//!   "domain": {"base": ["1/4","1/4","1/4"], "half_width": "1/2", "grid": 5},
//!   "tolerances": {"algebra": 1e-10}
//! }
//! ```
//!
//! `convention` states whether `eta` (and a matrix-valued `mu`) hold the
//! contravariant `η^{ij}`, `μ^{αβ}` or the covariant `η_{ij}`, `μ_{αβ}`.
//! `{"scale_of_eta": c}` always means `μ^{αβ} = c·η^{αβ}`. Metric entries and
//! coefficients are rational strings or JSON integers; JSON floats are accepted
//! only in float mode, and are converted exactly.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{check_dim, GeomError, Result};
use crate::potential::metric::{invert_metric, MetricMatrix};
use crate::potential::poly::{MultiIndex, PolynomialPotential};
use crate::potential::gradient_potentials;
use crate::scalar::{format_rational, parse_rational, rational, rational_from_f64, Mode, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Contravariant,
    Covariant,
}

/// Either the `L` functions `ψ_α` or a single potential `Φ` (then `ψ_α = ∂Φ/∂u^α`).
#[derive(Clone, Debug, PartialEq)]
pub enum Potentials {
    Psi(Vec<PolynomialPotential>),
    Phi(PolynomialPotential),
}

/// How `μ` was specified.
#[derive(Clone, Debug, PartialEq)]
pub enum MuSpec {
    /// Explicit `μ^{αβ}`.
    Matrix(MetricMatrix),
    /// `μ^{αβ} = c·η^{αβ}` kept symbolically.
    ScaleOfEta(Rational),
}

/// Hypercube `base ± half_width` sampled with `grid` points per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub base: Vec<Rational>,
    pub half_width: Rational,
    pub grid: usize,
}

impl Domain {
    pub fn centered(dim: usize) -> Self {
        Self {
            base: vec![rational(0, 1); dim],
            half_width: rational(1, 2),
            grid: 5,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Node coordinates along one axis, ascending.
    pub fn axis_coords(&self, axis: usize) -> Vec<Rational> {
        let b = &self.base[axis];
        if self.grid <= 1 {
            return vec![b.clone()];
        }
        let steps = Rational::from_i64(self.grid as i64 - 1);
        (0..self.grid)
            .map(|t| {
                let frac = Rational::from_i64(2 * t as i64) / steps.clone() - Rational::from_i64(1);
                b + &self.half_width * frac
            })
            .collect()
    }

    /// Grid spacing (zero for a single-point grid).
    pub fn spacing(&self) -> Rational {
        if self.grid <= 1 {
            return rational(0, 1);
        }
        &self.half_width * Rational::from_i64(2) / Rational::from_i64(self.grid as i64 - 1)
    }

    /// All grid points in row-major order (last axis fastest).
    pub fn points<S: Scalar>(&self) -> Vec<Vec<S>> {
        let axes: Vec<Vec<S>> = (0..self.dim())
            .map(|a| self.axis_coords(a).iter().map(S::from_rational).collect())
            .collect();
        let shape = vec![axes.first().map_or(1, Vec::len); self.dim()];
        crate::linalg::MultiIndexIter::new(&shape)
            .map(|idx| idx.iter().enumerate().map(|(a, &i)| axes[a][i].clone()).collect())
            .collect()
    }

    pub fn base_f64(&self) -> Vec<f64> {
        self.base.iter().map(Scalar::to_f64).collect()
    }
}

/// Pass/fail thresholds for float checks; exact checks always require zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Pure-algebra residuals in float mode.
    pub algebra: f64,
    /// ODE-integration checks.
    pub ode: f64,
    /// Finite-difference verifications.
    pub finite_difference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebra: 1e-10,
            ode: 1e-8,
            finite_difference: 1e-4,
        }
    }
}

/// Full data of the flat-coordinate problem: `N`, `L`, `η`, `μ`, the potentials,
/// the sampling domain and tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    n: usize,
    l: usize,
    eta_inv: MetricMatrix,
    eta: MetricMatrix,
    mu_spec: MuSpec,
    mu_inv: MetricMatrix,
    mu: MetricMatrix,
    potentials: Potentials,
    pub domain: Domain,
    pub tolerances: Tolerances,
}

impl ProblemSpec {
    /// Validates and assembles a problem. `eta_inv` is `η^{ij}`.
    pub fn new(
        eta_inv: MetricMatrix,
        mu_spec: MuSpec,
        potentials: Potentials,
        domain: Domain,
        tolerances: Tolerances,
    ) -> Result<Self> {
        let n = eta_inv.dim();
        let l = match &potentials {
            Potentials::Phi(phi) => {
                check_dim("potential Φ", n, phi.dim())?;
                n
            }
            Potentials::Psi(psi) => {
                if psi.is_empty() {
                    return Err(GeomError::Invalid("psi must contain at least one function".into()));
                }
                for p in psi {
                    check_dim("potential ψ_α", n, p.dim())?;
                }
                psi.len()
            }
        };
        let mu_inv = match &mu_spec {
            MuSpec::Matrix(m) => m.clone(),
            MuSpec::ScaleOfEta(c) => {
                if n != l {
                    return Err(GeomError::Invalid("mu = c·eta requires L = N".into()));
                }
                eta_inv.scaled(c)?
            }
        };
        check_dim("mu", l, mu_inv.dim())?;
        check_dim("domain base", n, domain.dim())?;
        if domain.grid == 0 {
            return Err(GeomError::Invalid("grid must have at least one point per axis".into()));
        }
        if domain.half_width < rational(0, 1) {
            return Err(GeomError::Invalid("half_width must be nonnegative".into()));
        }
        let eta = invert_metric(&eta_inv)?;
        let mu = invert_metric(&mu_inv)?;
        Ok(Self {
            n,
            l,
            eta_inv,
            eta,
            mu_spec,
            mu_inv,
            mu,
            potentials,
            domain,
            tolerances,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `η^{ij}`.
    pub fn eta_inv(&self) -> &MetricMatrix {
        &self.eta_inv
    }

    /// `η_{ij}`, the first fundamental form.
    pub fn eta(&self) -> &MetricMatrix {
        &self.eta
    }

    /// `μ^{αβ}`.
    pub fn mu_inv(&self) -> &MetricMatrix {
        &self.mu_inv
    }

    /// `μ_{αβ}`, the Gram matrix of the normals.
    pub fn mu(&self) -> &MetricMatrix {
        &self.mu
    }

    pub fn mu_spec(&self) -> &MuSpec {
        &self.mu_spec
    }

    /// The scalar `c` when `μ = c·η` was given symbolically.
    pub fn mu_scale(&self) -> Option<&Rational> {
        match &self.mu_spec {
            MuSpec::ScaleOfEta(c) => Some(c),
            MuSpec::Matrix(_) => None,
        }
    }

    pub fn potentials(&self) -> &Potentials {
        &self.potentials
    }

    pub fn phi(&self) -> Option<&PolynomialPotential> {
        match &self.potentials {
            Potentials::Phi(p) => Some(p),
            Potentials::Psi(_) => None,
        }
    }

    /// The functions `ψ_α`, derived from `Φ` when the problem is potential.
    pub fn psi(&self) -> Vec<PolynomialPotential> {
        match &self.potentials {
            Potentials::Psi(p) => p.clone(),
            Potentials::Phi(phi) => gradient_potentials(phi),
        }
    }

    /// Signature `(p, q)` of the ambient space: sum of the signatures of `η` and `μ`.
    pub fn ambient_signature(&self) -> (usize, usize) {
        let (a, b) = self.eta.signature();
        let (c, d) = self.mu.signature();
        (a + c, b + d)
    }

    /// Re-checks nondegeneracy of both metrics under the mode's criterion.
    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        self.eta_inv.check_nondegenerate(mode)?;
        self.mu_inv.check_nondegenerate(mode)
    }

    pub fn with_potentials(&self, potentials: Potentials) -> Result<Self> {
        Self::new(
            self.eta_inv.clone(),
            self.mu_spec.clone(),
            potentials,
            self.domain.clone(),
            self.tolerances.clone(),
        )
    }

    pub fn with_domain(&self, domain: Domain) -> Result<Self> {
        let mut out = self.clone();
        check_dim("domain base", self.n, domain.dim())?;
        out.domain = domain;
        Ok(out)
    }

    pub fn from_json_str(text: &str, mode: Mode) -> Result<Self> {
        let raw: RawProblem = serde_json::from_str(text)?;
        raw.into_spec(mode)
    }

    pub fn from_json_file(path: &std::path::Path, mode: Mode) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?, mode)
    }

    /// Canonical JSON form (contravariant convention, rational strings).
    pub fn to_json(&self) -> Value {
        let mat = |m: &MetricMatrix| {
            Value::Array(
                m.matrix()
                    .to_rows()
                    .iter()
                    .map(|r| Value::Array(r.iter().map(|q| json!(format_rational(q))).collect()))
                    .collect(),
            )
        };
        let mu = match &self.mu_spec {
            MuSpec::Matrix(m) => mat(m),
            MuSpec::ScaleOfEta(c) => json!({ "scale_of_eta": format_rational(c) }),
        };
        let mut obj = serde_json::Map::new();
        obj.insert("n".into(), json!(self.n));
        obj.insert("l".into(), json!(self.l));
        obj.insert("convention".into(), json!("contravariant"));
        obj.insert("eta".into(), mat(&self.eta_inv));
        obj.insert("mu".into(), mu);
        match &self.potentials {
            Potentials::Phi(p) => {
                obj.insert("phi".into(), poly_to_json(p));
            }
            Potentials::Psi(ps) => {
                obj.insert("psi".into(), Value::Array(ps.iter().map(poly_to_json).collect()));
            }
        }
        obj.insert(
            "domain".into(),
            json!({
                "base": self.domain.base.iter().map(format_rational).collect::<Vec<_>>(),
                "half_width": format_rational(&self.domain.half_width),
                "grid": self.domain.grid,
            }),
        );
        obj.insert("tolerances".into(), serde_json::to_value(&self.tolerances).expect("plain struct"));
        Value::Object(obj)
    }
}

pub fn poly_to_json(p: &PolynomialPotential) -> Value {
    json!({
        "terms": p.terms().map(|(m, c)| json!({
            "exps": m.exponents(),
            "coeff": format_rational(c),
        })).collect::<Vec<_>>()
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    n: usize,
    l: usize,
    convention: String,
    eta: Vec<Vec<Value>>,
    #[serde(default)]
    mu: Option<Value>,
    #[serde(default)]
    phi: Option<RawPoly>,
    #[serde(default)]
    psi: Option<Vec<RawPoly>>,
    #[serde(default)]
    domain: Option<RawDomain>,
    #[serde(default)]
    tolerances: Option<Tolerances>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoly {
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    exps: Vec<u32>,
    coeff: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    base: Option<Vec<Value>>,
    half_width: Option<Value>,
    grid: Option<usize>,
}

/// Coefficient or metric entry: rational string, integer, or (float mode) float.
fn entry(v: &Value, mode: Mode, what: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                Ok(rational(i, 1))
            } else if mode == Mode::Float {
                rational_from_f64(num.as_f64().unwrap_or(f64::NAN))
            } else {
                Err(GeomError::Parse(format!(
                    "{what}: float {num} rejected in rational mode (use a \"p/q\" string)"
                )))
            }
        }
        other => Err(GeomError::Parse(format!("{what}: expected a number or rational string, got {other}"))),
    }
}

/// Domain coordinates: any number (converted exactly) or rational string.
fn coordinate(v: &Value, what: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(num) => match num.as_i64() {
            Some(i) => Ok(rational(i, 1)),
            None => rational_from_f64(num.as_f64().unwrap_or(f64::NAN)),
        },
        other => Err(GeomError::Parse(format!("{what}: expected a number, got {other}"))),
    }
}

fn matrix(rows: &[Vec<Value>], mode: Mode, what: &str) -> Result<MetricMatrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|v| entry(v, mode, what)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    MetricMatrix::from_rows(rows)
}

fn poly(raw: &RawPoly, dim: usize, mode: Mode) -> Result<PolynomialPotential> {
    let terms = raw
        .terms
        .iter()
        .map(|t| Ok((MultiIndex::new(t.exps.clone()), entry(&t.coeff, mode, "coefficient")?)))
        .collect::<Result<Vec<_>>>()?;
    PolynomialPotential::from_terms(dim, terms)
}

impl RawProblem {
    fn into_spec(self, mode: Mode) -> Result<ProblemSpec> {
        let convention = match self.convention.as_str() {
            "contravariant" => Convention::Contravariant,
            "covariant" => Convention::Covariant,
            other => {
                return Err(GeomError::Parse(format!(
                    "convention must be \"contravariant\" or \"covariant\", got {other:?}"
                )))
            }
        };
        check_dim("eta rows", self.n, self.eta.len())?;
        let eta = matrix(&self.eta, mode, "eta")?;
        let eta_inv = match convention {
            Convention::Contravariant => eta,
            Convention::Covariant => invert_metric(&eta)?,
        };
        let potentials = match (self.phi, self.psi) {
            (Some(phi), None) => Potentials::Phi(poly(&phi, self.n, mode)?),
            (None, Some(psi)) => Potentials::Psi(
                psi.iter()
                    .map(|p| poly(p, self.n, mode))
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => return Err(GeomError::Invalid("exactly one of \"phi\" and \"psi\" must be given".into())),
        };
        let mu_spec = match self.mu {
            None if matches!(potentials, Potentials::Phi(_)) => MuSpec::ScaleOfEta(rational(1, 1)),
            None => return Err(GeomError::Invalid("\"mu\" is required when \"psi\" is given".into())),
            Some(Value::Object(obj)) => {
                let c = obj
                    .get("scale_of_eta")
                    .ok_or_else(|| GeomError::Parse("mu object must have \"scale_of_eta\"".into()))?;
                if obj.len() != 1 {
                    return Err(GeomError::Parse("mu object has unknown keys".into()));
                }
                MuSpec::ScaleOfEta(entry(c, mode, "mu scale")?)
            }
            Some(Value::Array(rows)) => {
                let rows = rows
                    .into_iter()
                    .map(|r| match r {
                        Value::Array(v) => Ok(v),
                        _ => Err(GeomError::Parse("mu rows must be arrays".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = matrix(&rows, mode, "mu")?;
                MuSpec::Matrix(match convention {
                    Convention::Contravariant => m,
                    Convention::Covariant => invert_metric(&m)?,
                })
            }
            Some(_) => return Err(GeomError::Parse("mu must be a matrix or {\"scale_of_eta\": c}".into())),
        };
        let mut domain = Domain::centered(self.n);
        if let Some(d) = self.domain {
            if let Some(base) = d.base {
                domain.base = base
                    .iter()
                    .map(|v| coordinate(v, "domain base"))
                    .collect::<Result<_>>()?;
            }
            if let Some(h) = d.half_width {
                domain.half_width = coordinate(&h, "half_width")?;
            }
            if let Some(g) = d.grid {
                domain.grid = g;
            }
        }
        let spec = ProblemSpec::new(
            eta_inv,
            mu_spec,
            potentials,
            domain,
            self.tolerances.unwrap_or_default(),
        )?;
        check_dim("declared l", self.l, spec.l())?;
        spec.check_mode(mode)?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"{
        "n": 3, "l": 3, "convention": "contravariant",
        "eta": [["0","0","1"],["0","1","0"],["1","0","0"]],
        "mu": {"scale_of_eta": "2"},
        "phi": {"terms": [
            {"exps": [2,0,1], "coeff": "1/2"},
            {"exps": [1,2,0], "coeff": "1/2"},
            {"exps": [0,2,2], "coeff": "1/4"},
            {"exps": [0,0,5], "coeff": "1/60"}
        ]},
        "domain": {"base": ["1/4", 0.25, "1/4"], "half_width": 0.5, "grid": 5}
    }"#;

    #[test]
    fn parses_potential_problem() {
        let spec = ProblemSpec::from_json_str(GOLDEN, Mode::Rational).unwrap();
        assert_eq!((spec.n(), spec.l()), (3, 3));
        assert_eq!(spec.mu_scale(), Some(&rational(2, 1)));
        assert_eq!(spec.mu_inv().get(0, 2), &rational(2, 1));
        assert_eq!(spec.mu().get(0, 2), &rational(1, 2));
        assert_eq!(spec.domain.base[1], rational(1, 4));
        assert_eq!(spec.domain.points::<Rational>().len(), 125);
        assert_eq!(spec.ambient_signature(), (4, 2));
        assert_eq!(spec.psi().len(), 3);
    }

    #[test]
    fn canonical_json_round_trips() {
        let spec = ProblemSpec::from_json_str(GOLDEN, Mode::Rational).unwrap();
        let text = serde_json::to_string(&spec.to_json()).unwrap();
        assert_eq!(ProblemSpec::from_json_str(&text, Mode::Rational).unwrap(), spec);
    }

    #[test]
    fn floats_rejected_in_rational_mode_only() {
        let text = GOLDEN.replace(r#""coeff": "1/60""#, r#""coeff": 0.015625"#);
        assert!(matches!(
            ProblemSpec::from_json_str(&text, Mode::Rational),
            Err(GeomError::Parse(_))
        ));
        let spec = ProblemSpec::from_json_str(&text, Mode::Float).unwrap();
        let phi = spec.phi().unwrap();
        assert_eq!(phi.coefficient(&MultiIndex::new(vec![0, 0, 5])), rational(1, 64));
    }

    #[test]
    fn covariant_convention_is_inverted() {
        let text = r#"{"n": 2, "l": 1, "convention": "covariant",
            "eta": [[2, 0], [0, -4]], "mu": [["1/2"]],
            "psi": [{"terms": [{"exps": [2, 0], "coeff": "1/2"}]}]}"#;
        let spec = ProblemSpec::from_json_str(text, Mode::Rational).unwrap();
        assert_eq!(spec.eta_inv().get(1, 1), &rational(-1, 4));
        assert_eq!(spec.mu_inv().get(0, 0), &rational(2, 1));
        assert_eq!(spec.domain, Domain::centered(2));
        assert_eq!(spec.ambient_signature(), (2, 1));
    }

    #[test]
    fn validation_errors() {
        let both = GOLDEN.replace(r#""domain""#, r#""psi": [], "domain""#);
        assert!(ProblemSpec::from_json_str(&both, Mode::Rational).is_err());
        let wrong_l = GOLDEN.replace(r#""l": 3"#, r#""l": 2"#);
        assert!(ProblemSpec::from_json_str(&wrong_l, Mode::Rational).is_err());
        let bad_conv = GOLDEN.replace("contravariant", "mixed");
        assert!(ProblemSpec::from_json_str(&bad_conv, Mode::Rational).is_err());
        let zero_c = GOLDEN.replace(r#""scale_of_eta": "2""#, r#""scale_of_eta": "0""#);
        assert!(matches!(
            ProblemSpec::from_json_str(&zero_c, Mode::Rational),
            Err(GeomError::ZeroScale)
        ));
        let degenerate = GOLDEN.replace(r#"["1","0","0"]]"#, r#"["0","0","0"]]"#);
        assert!(ProblemSpec::from_json_str(&degenerate, Mode::Rational).is_err());
    }

    #[test]
    fn axis_coordinates_are_symmetric_about_base() {
        let d = Domain {
            base: vec![rational(1, 3)],
            half_width: rational(1, 2),
            grid: 3,
        };
        assert_eq!(
            d.axis_coords(0),
            vec![rational(-1, 6), rational(1, 3), rational(5, 6)]
        );
        assert_eq!(d.spacing(), rational(1, 2));
    }
}
