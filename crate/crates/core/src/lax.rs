//! Transport for the auxiliary linear problem
//!
//! ```text
//! ∂p_j/∂u^i = λ Σ_{α,β} μ^{αβ} ω_{α,ij} b_β
//! ∂b_α/∂u^i = ρ Σ_{k,j} η^{kj} ω_{α,ij} p_k
//! ```
//!
//! where `p = ∇a`. The system is compatible for all `(λ, ρ)` exactly when the
//! Gauss and Ricci systems hold, so the holonomy of a small loop measures the
//! failure of those equations.

use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{Matrix, Tensor};
use crate::potential::{HessianField, MetricMatrix, PolynomialPotential, ProblemSpec};
use crate::report::ResidualReport;
use crate::scalar::Scalar;
use crate::submanifold::second_forms;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParams {
    pub lambda: f64,
    pub rho: f64,
}

impl SpectralParams {
    pub fn new(lambda: f64, rho: f64) -> Self {
        Self { lambda, rho }
    }

    /// The default `{−1, −½, ½, 1, 2}²` grid.
    pub fn default_grid() -> Vec<SpectralParams> {
        const VALUES: [f64; 5] = [-1.0, -0.5, 0.5, 1.0, 2.0];
        VALUES
            .iter()
            .flat_map(|&l| VALUES.iter().map(move |&r| SpectralParams::new(l, r)))
            .collect()
    }
}

/// `p` holds the components `∂a/∂u^k`, `b` the functions `b_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxState {
    pub p: Vec<f64>,
    pub b: Vec<f64>,
}

impl LaxState {
    pub fn zeros(n: usize, l: usize) -> Self {
        Self {
            p: vec![0.0; n],
            b: vec![0.0; l],
        }
    }

    /// The `k`-th canonical basis state of `ℝ^{N+L}`.
    pub fn basis(n: usize, l: usize, k: usize) -> Self {
        let mut s = Self::zeros(n, l);
        if k < n {
            s.p[k] = 1.0;
        } else {
            s.b[k - n] = 1.0;
        }
        s
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.p.iter().chain(&self.b).copied().collect()
    }

    fn from_slice(x: &[f64], n: usize) -> Self {
        Self {
            p: x[..n].to_vec(),
            b: x[n..].to_vec(),
        }
    }
}

/// Default RK4 substeps per loop edge.
pub const DEFAULT_SUBSTEPS: usize = 64;

#[derive(Clone, Debug)]
pub struct LaxSystem {
    field: HessianField,
    eta_inv: Matrix<f64>,
    mu_inv: Matrix<f64>,
    n: usize,
    l: usize,
}

impl LaxSystem {
    pub fn new(psi: &[PolynomialPotential], eta_inv: &MetricMatrix, mu_inv: &MetricMatrix) -> Result<Self> {
        let n = eta_inv.dim();
        check_dim("mu^{αβ}", psi.len(), mu_inv.dim())?;
        Ok(Self {
            field: HessianField::new(psi, n)?,
            eta_inv: eta_inv.to_f64(),
            mu_inv: mu_inv.to_f64(),
            n,
            l: psi.len(),
        })
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        Self::new(&spec.psi(), spec.eta_inv(), spec.mu_inv())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.l)
    }

    /// Coefficient matrix `M(u; d)` with `dX/ds = M X` along direction `d`, `X = (p, b)`.
    pub fn coefficient_matrix(&self, u: &[f64], dir: &[f64], params: SpectralParams) -> Matrix<f64> {
        let (n, l) = (self.n, self.l);
        let omega = self.field.hessians(u);
        let mut m = Matrix::zeros(n + l, n + l);
        for (i, &di) in dir.iter().enumerate() {
            if di == 0.0 {
                continue;
            }
            for j in 0..n {
                for b in 0..l {
                    let v: f64 = (0..l).map(|a| self.mu_inv[(a, b)] * omega[a][i][j]).sum();
                    m[(j, n + b)] += params.lambda * di * v;
                }
            }
            for a in 0..l {
                for k in 0..n {
                    let v: f64 = (0..n).map(|j| self.eta_inv[(k, j)] * omega[a][i][j]).sum();
                    m[(n + a, k)] += params.rho * di * v;
                }
            }
        }
        m
    }

    fn rk4_step(&self, x: &[f64], u: &[f64], dir: &[f64], h: f64, params: SpectralParams) -> Vec<f64> {
        let at = |s: f64| -> Vec<f64> { u.iter().zip(dir).map(|(a, d)| a + s * d).collect() };
        let f = |s: f64, y: &[f64]| self.coefficient_matrix(&at(s), dir, params).mul_vec(y).expect("square system");
        let axpy = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
        let k1 = f(0.0, x);
        let k2 = f(0.5 * h, &axpy(x, &k1, 0.5 * h));
        let k3 = f(0.5 * h, &axpy(x, &k2, 0.5 * h));
        let k4 = f(h, &axpy(x, &k3, h));
        x.iter()
            .enumerate()
            .map(|(i, xi)| xi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }

    /// Transports `state` along the polyline `path` with RK4 steps of length `h`.
    ///
    /// A segment whose length is not a multiple of `h` (to 1e-9 relative) ends
    /// with one shorter step.
    pub fn transport(&self, state: &LaxState, path: &[Vec<f64>], params: SpectralParams, h: f64) -> Result<LaxState> {
        if h.is_nan() || h <= 0.0 {
            return Err(GeomError::Invalid(format!("step must be positive, got {h}")));
        }
        check_dim("lax state p", self.n, state.p.len())?;
        check_dim("lax state b", self.l, state.b.len())?;
        let mut x = state.to_vec();
        for w in path.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            check_dim("path point", self.n, a.len())?;
            check_dim("path point", self.n, b.len())?;
            let delta: Vec<f64> = b.iter().zip(a).map(|(p, q)| p - q).collect();
            let len = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
            if len == 0.0 {
                continue;
            }
            let dir: Vec<f64> = delta.iter().map(|d| d / len).collect();
            for (s, step) in segment_steps(len, h) {
                let u: Vec<f64> = a.iter().zip(&dir).map(|(p, d)| p + s * d).collect();
                x = self.rk4_step(&x, &u, &dir, step, params);
            }
        }
        Ok(LaxState::from_slice(&x, self.n))
    }

    /// Holonomy defect of the axis-aligned square loop
    /// `base → base + h e_i → base + h e_i + h e_j → base + h e_j → base`:
    /// max over the `N + L` basis states of `|transported − initial|_∞`.
    pub fn holonomy_defect(
        &self,
        base: &[f64],
        h_loop: f64,
        axes: (usize, usize),
        params: SpectralParams,
        substeps: usize,
    ) -> Result<f64> {
        let (i, j) = axes;
        if i == j || i >= self.n || j >= self.n {
            return Err(GeomError::Invalid(format!("loop axes ({i}, {j}) must be distinct and < {}", self.n)));
        }
        if substeps == 0 {
            return Err(GeomError::Invalid("substeps must be positive".into()));
        }
        check_dim("loop base", self.n, base.len())?;
        if h_loop == 0.0 {
            return Ok(0.0);
        }
        let corner = |di: f64, dj: f64| {
            let mut p = base.to_vec();
            p[i] += di;
            p[j] += dj;
            p
        };
        let path = [
            corner(0.0, 0.0),
            corner(h_loop, 0.0),
            corner(h_loop, h_loop),
            corner(0.0, h_loop),
            corner(0.0, 0.0),
        ];
        let h = h_loop.abs() / substeps as f64;
        let mut defect: f64 = 0.0;
        for k in 0..self.n + self.l {
            let s0 = LaxState::basis(self.n, self.l, k);
            let s1 = self.transport(&s0, &path, params, h)?;
            let d = crate::linalg::max_abs_diff(&s0.to_vec(), &s1.to_vec());
            defect = defect.max(d);
        }
        Ok(defect)
    }

    /// Largest holonomy defect over all axis pairs `i < j` and the given parameters.
    pub fn max_holonomy_defect(
        &self,
        base: &[f64],
        h_loop: f64,
        params: &[SpectralParams],
        substeps: usize,
    ) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &p in params {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    worst = worst.max(self.holonomy_defect(base, h_loop, (i, j), p, substeps)?);
                }
            }
        }
        Ok(worst)
    }
}

/// `(offset, length)` of the RK4 steps covering a segment of length `len`.
pub(crate) fn segment_steps(len: f64, h: f64) -> Vec<(f64, f64)> {
    let ratio = len / h;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * rounded {
        let count = rounded as usize;
        let step = len / count as f64;
        return (0..count).map(|k| (k as f64 * step, step)).collect();
    }
    let full = ratio.floor() as usize;
    let mut steps: Vec<(f64, f64)> = (0..full).map(|k| (k as f64 * h, h)).collect();
    let rest = len - full as f64 * h;
    if rest > 0.0 {
        steps.push((full as f64 * h, rest));
    }
    steps
}

/// Residuals of the two compatibility identities of the linear problem:
/// - first: `[i,j,k,s]` of `Σ μ^{αβ}(ω_{α,ij}ω_{β,ks} − ω_{α,ik}ω_{β,js})`,
/// - second: `[α,γ,i,l]` of `Σ η^{kj}(ω_{α,ij}ω_{γ,kl} − ω_{α,lj}ω_{γ,ki})`.
///
/// Entry-wise the first is the Gauss tensor at `[i,s,j,k]` and the second is
/// the Ricci tensor at the same indices.
pub fn consistency_residual<S: Scalar>(
    psi: &[PolynomialPotential],
    eta_inv: &MetricMatrix,
    mu_inv: &MetricMatrix,
    point: &[S],
) -> Result<(ResidualReport<S>, ResidualReport<S>)> {
    let (b1, b2) = consistency_tensors(psi, eta_inv, mu_inv, point)?;
    Ok((
        ResidualReport::from_tensor("lax_consistency_mu", &b1, point),
        ResidualReport::from_tensor("lax_consistency_eta", &b2, point),
    ))
}

pub fn consistency_tensors<S: Scalar>(
    psi: &[PolynomialPotential],
    eta_inv: &MetricMatrix,
    mu_inv: &MetricMatrix,
    point: &[S],
) -> Result<(Tensor<S>, Tensor<S>)> {
    let n = eta_inv.dim();
    let l = psi.len();
    check_dim("mu^{αβ}", l, mu_inv.dim())?;
    let forms = second_forms(psi, point)?;
    let w = |a: usize, i: usize, j: usize| forms.forms[a][(i, j)].clone();
    let mu: Matrix<S> = mu_inv.to_scalar();
    let eta: Matrix<S> = eta_inv.to_scalar();
    let b1 = Tensor::from_fn(&[n, n, n, n], |idx| {
        let (i, j, k, s) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = S::zero();
        for a in 0..l {
            for b in 0..l {
                acc = acc + mu[(a, b)].clone() * (w(a, i, j) * w(b, k, s) - w(a, i, k) * w(b, j, s));
            }
        }
        acc
    });
    let b2 = Tensor::from_fn(&[l, l, n, n], |idx| {
        let (a, g, i, ll) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = S::zero();
        for k in 0..n {
            for j in 0..n {
                acc = acc + eta[(k, j)].clone() * (w(a, i, j) * w(g, k, ll) - w(a, ll, j) * w(g, k, i));
            }
        }
        acc
    });
    Ok((b1, b2))
}
