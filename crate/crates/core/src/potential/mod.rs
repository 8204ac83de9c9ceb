//! Exact scalar data of the problem: the potentials `Φ`, `ψ_α`, the constant
//! metrics `η`, `μ`, and the problem container.

mod metric;
mod poly;
mod problem;

pub use metric::{invert_metric, invert_metric_f64, MetricMatrix, FLOAT_DET_THRESHOLD};
pub use poly::{FloatPolynomial, HessianField, MultiIndex, PolynomialPotential};
pub use problem::{poly_to_json, Convention, Domain, MuSpec, Potentials, ProblemSpec, Tolerances};

use crate::error::{check_dim, Result};
use crate::linalg::{Matrix, Tensor};
use crate::scalar::Scalar;

/// `∂^{|order|} p / ∂u^{order}` at `point`.
pub fn eval_partial<S: Scalar>(p: &PolynomialPotential, order: &MultiIndex, point: &[S]) -> Result<S> {
    check_dim("evaluation point", p.dim(), point.len())?;
    p.partial(order)?.eval(point)
}

/// Hessian `∂²p/∂u^i∂u^j` at `point`; symmetric by construction.
pub fn hessian<S: Scalar>(p: &PolynomialPotential, point: &[S]) -> Result<Matrix<S>> {
    let n = p.dim();
    check_dim("evaluation point", n, point.len())?;
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        let di = p.derivative(i);
        for j in i..n {
            let v = di.derivative(j).eval(point)?;
            h[(j, i)] = v.clone();
            h[(i, j)] = v;
        }
    }
    Ok(h)
}

/// Third-derivative tensor `Φ_{ijk}` at `point`; fully symmetric by construction.
pub fn third_tensor<S: Scalar>(phi: &PolynomialPotential, point: &[S]) -> Result<Tensor<S>> {
    let n = phi.dim();
    check_dim("evaluation point", n, point.len())?;
    let mut t = Tensor::zeros(&[n, n, n]);
    for i in 0..n {
        let di = phi.derivative(i);
        for j in i..n {
            let dij = di.derivative(j);
            for k in j..n {
                let v = dij.derivative(k).eval(point)?;
                for [a, b, c] in [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
                    t.set(&[a, b, c], v.clone());
                }
            }
        }
    }
    Ok(t)
}

/// `ψ_α = ∂Φ/∂u^α`, α = 1..N.
pub fn gradient_potentials(phi: &PolynomialPotential) -> Vec<PolynomialPotential> {
    (0..phi.dim()).map(|a| phi.derivative(a)).collect()
}
