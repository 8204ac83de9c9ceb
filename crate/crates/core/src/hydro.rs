//! Hydrodynamic-type flows `u_{t_α} = V_α(u) u_x` with `V_α = η⁻¹ Hess ψ_α`,
//! on a periodic grid of length 1.
//!
//! Space: 4th-order central differences. Time: classical RK4. An optional
//! filter zeroes the top third of Fourier modes after every step.

use std::f64::consts::TAU;

use rustfft::{num_complex::Complex64, FftPlanner};

use crate::error::{check_dim, GeomError, Result};
use crate::linalg::Matrix;
use crate::potential::{HessianField, MetricMatrix, PolynomialPotential, ProblemSpec};

pub const MIN_POINTS: usize = 16;
pub const CFL_LIMIT: f64 = 0.5;

/// Values `u(x_m) ∈ ℝ^N` at `x_m = m / M`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    values: Vec<Vec<f64>>,
}

impl GridState {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() < MIN_POINTS {
            return Err(GeomError::Invalid(format!(
                "grid needs at least {MIN_POINTS} points, got {}",
                values.len()
            )));
        }
        let n = values[0].len();
        for v in &values {
            check_dim("grid state component count", n, v.len())?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(GeomError::Invalid("grid state has non-finite values".into()));
            }
        }
        Ok(Self { values })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        Self::new((0..m).map(|i| f(i as f64 / m as f64)).collect())
    }

    /// `u^i(x) = base^i + amplitude · sin(2π(mode·x + i/N))`.
    pub fn single_mode(m: usize, base: &[f64], amplitude: f64, mode: u32) -> Result<Self> {
        let n = base.len() as f64;
        Self::from_fn(m, |x| {
            base.iter()
                .enumerate()
                .map(|(i, b)| b + amplitude * (TAU * (mode as f64 * x + i as f64 / n)).sin())
                .collect()
        })
    }

    pub fn points(&self) -> usize {
        self.values.len()
    }

    pub fn components(&self) -> usize {
        self.values[0].len()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points() as f64
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// `(max |u − ū|, rms |u − ū|)` around the grid mean `ū`.
    pub fn norms(&self) -> (f64, f64) {
        let m = self.points() as f64;
        let n = self.components();
        let mean: Vec<f64> = (0..n).map(|i| self.values.iter().map(|v| v[i]).sum::<f64>() / m).collect();
        let mut linf: f64 = 0.0;
        let mut sq = 0.0;
        for v in &self.values {
            for i in 0..n {
                let d = v[i] - mean[i];
                linf = linf.max(d.abs());
                sq += d * d;
            }
        }
        (linf, (sq / m).sqrt())
    }

    fn axpy(&self, k: &[Vec<f64>], c: f64) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .zip(k)
            .map(|(u, d)| u.iter().zip(d).map(|(a, b)| a + c * b).collect())
            .collect()
    }
}

/// Spatial derivative by the periodic 4th-order central stencil.
pub fn derivative(values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = values.len();
    let inv = m as f64 / 12.0;
    (0..m)
        .map(|j| {
            let at = |o: isize| &values[(j as isize + o).rem_euclid(m as isize) as usize];
            let (p2, p1, m1, m2) = (at(2), at(1), at(-1), at(-2));
            (0..values[j].len())
                .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) * inv)
                .collect()
        })
        .collect()
}

/// Zeroes every Fourier mode with `|k| > M/3`, componentwise.
pub fn filter_top_third(values: &mut [Vec<f64>]) {
    let m = values.len();
    let n = values[0].len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let cutoff = m / 3;
    for i in 0..n {
        let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(v[i], 0.0)).collect();
        fwd.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            if k.min(m - k) > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        inv.process(&mut buf);
        for (v, c) in values.iter_mut().zip(&buf) {
            v[i] = c.re / m as f64;
        }
    }
}

#[derive(Clone, Debug)]
pub struct HydroSystem {
    field: HessianField,
    eta_inv: Matrix<f64>,
}

impl HydroSystem {
    pub fn new(psi: &[PolynomialPotential], eta_inv: &MetricMatrix) -> Result<Self> {
        Ok(Self {
            field: HessianField::new(psi, eta_inv.dim())?,
            eta_inv: eta_inv.to_f64(),
        })
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        Self::new(&spec.psi(), spec.eta_inv())
    }

    pub fn flows(&self) -> usize {
        self.field.count()
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    /// `V_α(u) = η⁻¹ Hess ψ_α(u)`.
    pub fn velocity(&self, alpha: usize, u: &[f64]) -> Matrix<f64> {
        let h = Matrix::from_rows(self.field.hessian(alpha, u)).expect("square Hessian");
        self.eta_inv.mul(&h).expect("matching dimensions")
    }

    fn check(&self, state: &GridState, alpha: usize) -> Result<()> {
        check_dim("grid state component count", self.dim(), state.components())?;
        if alpha >= self.flows() {
            return Err(GeomError::Invalid(format!("flow index {alpha} out of range (have {})", self.flows())));
        }
        Ok(())
    }

    /// `dt · max_x ‖V_α(u(x))‖_∞ / Δx`; the row-sum norm bounds the spectral radius.
    pub fn cfl(&self, state: &[Vec<f64>], alpha: usize, dt: f64) -> f64 {
        let m = state.len() as f64;
        let speed = state
            .iter()
            .map(|u| {
                let v = self.velocity(alpha, u);
                (0..v.rows())
                    .map(|i| (0..v.cols()).map(|j| v[(i, j)].abs()).sum::<f64>())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        dt * speed * m
    }

    fn rhs(&self, values: &[Vec<f64>], alpha: usize) -> Vec<Vec<f64>> {
        derivative(values)
            .iter()
            .zip(values)
            .map(|(ux, u)| self.velocity(alpha, u).mul_vec(ux).expect("matching dimensions"))
            .collect()
    }

    pub fn evolve(&self, state: &GridState, alpha: usize, cfg: &EvolveConfig) -> Result<Evolution> {
        self.check(state, alpha)?;
        if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
            return Err(GeomError::Invalid(format!("time step must be positive, got {}", cfg.dt)));
        }
        let dt = cfg.dt;
        let mut cur = state.clone();
        let mut max_cfl: f64 = 0.0;
        let mut norms = vec![(0.0, cur.norms())];
        for step in 0..cfg.steps {
            let cfl = self.cfl(&cur.values, alpha, dt);
            max_cfl = max_cfl.max(cfl);
            if cfl > CFL_LIMIT && !cfg.allow_cfl_violation {
                return Err(GeomError::CflViolation { cfl, limit: CFL_LIMIT });
            }
            let k1 = self.rhs(&cur.values, alpha);
            let k2 = self.rhs(&cur.axpy(&k1, 0.5 * dt), alpha);
            let k3 = self.rhs(&cur.axpy(&k2, 0.5 * dt), alpha);
            let k4 = self.rhs(&cur.axpy(&k3, dt), alpha);
            for (j, u) in cur.values.iter_mut().enumerate() {
                for i in 0..u.len() {
                    u[i] += dt / 6.0 * (k1[j][i] + 2.0 * k2[j][i] + 2.0 * k3[j][i] + k4[j][i]);
                }
            }
            if cfg.filter {
                filter_top_third(&mut cur.values);
            }
            if cur.values.iter().flatten().any(|x| !x.is_finite()) {
                return Err(GeomError::NonFinite { step: step + 1 });
            }
            norms.push(((step + 1) as f64 * dt, cur.norms()));
        }
        Ok(Evolution {
            cfl_violated: max_cfl > CFL_LIMIT,
            state: cur,
            max_cfl,
            norms,
        })
    }

    /// `‖β∘α − α∘β‖_∞` where each flow runs for `cfg.steps` steps of `cfg.dt`.
    pub fn commutator_defect(&self, state: &GridState, alpha: usize, beta: usize, cfg: &EvolveConfig) -> Result<f64> {
        let ab = self.evolve(&self.evolve(state, alpha, cfg)?.state, beta, cfg)?;
        let ba = self.evolve(&self.evolve(state, beta, cfg)?.state, alpha, cfg)?;
        Ok(ab.state.max_abs_diff(&ba.state))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub steps: usize,
    pub filter: bool,
    /// Proceed past a CFL number above the limit instead of failing.
    pub allow_cfl_violation: bool,
}

impl EvolveConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            filter: false,
            allow_cfl_violation: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: GridState,
    pub max_cfl: f64,
    pub cfl_violated: bool,
    /// `(t, (max-norm, rms))` of the deviation from the mean, one entry per step including `t = 0`.
    pub norms: Vec<(f64, (f64, f64))>,
}
