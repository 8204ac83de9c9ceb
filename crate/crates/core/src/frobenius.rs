//! Pointwise Frobenius algebra of a potential.
//!
//! Index layout: structure constants `c^k_{ij}` are stored as a rank-3 tensor
//! indexed `[k][i][j]`, i.e. `e_i ∘ e_j = Σ_k c[k][i][j] e_k`.
//!
//! The Weingarten operators carry the opposite sign of the product:
//! `(A_α)^i_j = −η^{ik} ω_{α,kj}`, so in the potential case
//! `−(A_α)^i_j = c^i_{αj}`.

use crate::error::{check_dim, Result};
use crate::linalg::{Matrix, Tensor};
use crate::potential::{hessian, third_tensor, MetricMatrix, PolynomialPotential};
use crate::report::ResidualReport;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<S> {
    pub point: Vec<S>,
    /// `c[k][i][j] = c^k_{ij}`.
    pub c: Tensor<S>,
}

impl<S: Scalar> StructureConstants<S> {
    /// Wraps an arbitrary `[k][i][j]` tensor (e.g. a hand-built fixture).
    pub fn from_tensor(point: Vec<S>, c: Tensor<S>) -> Result<Self> {
        let n = c.shape().first().copied().unwrap_or(0);
        check_dim("structure constant rank", 3, c.shape().len())?;
        for &d in c.shape() {
            check_dim("structure constant shape", n, d)?;
        }
        Ok(Self { point, c })
    }

    pub fn dim(&self) -> usize {
        self.c.shape()[0]
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &S {
        self.c.get(&[k, i, j])
    }

    /// Coordinates of `x ∘ y` for `x, y` given in the basis `e_i`.
    pub fn product(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut acc = S::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc = acc + x[i].clone() * y[j].clone() * self.get(k, i, j).clone();
                    }
                }
                acc
            })
            .collect()
    }
}

/// `c^k_{ij} = Σ_s η^{ks} Φ_{sij}` at `point`.
pub fn structure_constants<S: Scalar>(
    phi: &PolynomialPotential,
    eta_inv: &MetricMatrix,
    point: &[S],
) -> Result<StructureConstants<S>> {
    let n = phi.dim();
    check_dim("eta^{ij}", n, eta_inv.dim())?;
    let t = third_tensor(phi, point)?;
    let eta: Matrix<S> = eta_inv.to_scalar();
    let c = Tensor::from_fn(&[n, n, n], |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        (0..n).fold(S::zero(), |acc, s| acc + eta[(k, s)].clone() * t.get(&[s, i, j]).clone())
    });
    Ok(StructureConstants {
        point: point.to_vec(),
        c,
    })
}

/// `[i,j,k,m]` entry: `Σ_s (c^s_{ij} c^m_{sk} − c^s_{jk} c^m_{is})`, the `e_m`
/// component of `(e_i∘e_j)∘e_k − e_i∘(e_j∘e_k)`.
pub fn associativity_tensor<S: Scalar>(c: &StructureConstants<S>) -> Tensor<S> {
    let n = c.dim();
    Tensor::from_fn(&[n, n, n, n], |idx| {
        let (i, j, k, m) = (idx[0], idx[1], idx[2], idx[3]);
        (0..n).fold(S::zero(), |acc, s| {
            acc + c.get(s, i, j).clone() * c.get(m, s, k).clone()
                - c.get(s, j, k).clone() * c.get(m, i, s).clone()
        })
    })
}

pub fn associativity_residual<S: Scalar>(c: &StructureConstants<S>) -> ResidualReport<S> {
    ResidualReport::from_tensor("associativity", &associativity_tensor(c), &c.point)
}

/// `[i,j,k]` entry: `⟨e_i∘e_j, e_k⟩ − ⟨e_i, e_j∘e_k⟩` with `eta` the covariant `η_{ij}`.
pub fn invariance_tensor<S: Scalar>(c: &StructureConstants<S>, eta: &MetricMatrix) -> Result<Tensor<S>> {
    let n = c.dim();
    check_dim("eta_{ij}", n, eta.dim())?;
    let g: Matrix<S> = eta.to_scalar();
    Ok(Tensor::from_fn(&[n, n, n], |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        (0..n).fold(S::zero(), |acc, s| {
            acc + c.get(s, i, j).clone() * g[(s, k)].clone() - c.get(s, j, k).clone() * g[(i, s)].clone()
        })
    }))
}

pub fn invariance_residual<S: Scalar>(c: &StructureConstants<S>, eta: &MetricMatrix) -> Result<ResidualReport<S>> {
    Ok(ResidualReport::from_tensor("invariance", &invariance_tensor(c, eta)?, &c.point))
}

/// WDVV residual tensor `[i,j,m,n]`:
/// `Σ_{k,l} Φ_{ijk} η^{kl} Φ_{lmn} − Φ_{imk} η^{kl} Φ_{ljn}`.
pub fn wdvv_tensor<S: Scalar>(phi: &PolynomialPotential, eta_inv: &MetricMatrix, point: &[S]) -> Result<Tensor<S>> {
    let n = phi.dim();
    check_dim("eta^{ij}", n, eta_inv.dim())?;
    let t = third_tensor(phi, point)?;
    let eta: Matrix<S> = eta_inv.to_scalar();
    // raised[i][j][l] = Σ_k Φ_{ijk} η^{kl}
    let raised = Tensor::from_fn(&[n, n, n], |idx| {
        (0..n).fold(S::zero(), |acc, k| acc + t.get(&[idx[0], idx[1], k]).clone() * eta[(k, idx[2])].clone())
    });
    Ok(Tensor::from_fn(&[n, n, n, n], |idx| {
        let (i, j, m, nn) = (idx[0], idx[1], idx[2], idx[3]);
        (0..n).fold(S::zero(), |acc, l| {
            acc + raised.get(&[i, j, l]).clone() * t.get(&[l, m, nn]).clone()
                - raised.get(&[i, m, l]).clone() * t.get(&[l, j, nn]).clone()
        })
    }))
}

pub fn wdvv_residual<S: Scalar>(
    phi: &PolynomialPotential,
    eta_inv: &MetricMatrix,
    point: &[S],
) -> Result<ResidualReport<S>> {
    Ok(ResidualReport::from_tensor("wdvv", &wdvv_tensor(phi, eta_inv, point)?, point))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeingartenSet<S> {
    pub point: Vec<S>,
    pub operators: Vec<Matrix<S>>,
}

/// `A_α = −η^{-1} · Hess(ψ_α)` at `point`.
pub fn weingarten_operators<S: Scalar>(
    psi: &[PolynomialPotential],
    eta_inv: &MetricMatrix,
    point: &[S],
) -> Result<WeingartenSet<S>> {
    let eta: Matrix<S> = eta_inv.to_scalar();
    let neg_eta = eta.scale(&-S::one());
    let operators = psi
        .iter()
        .map(|p| {
            check_dim("psi dimension", eta_inv.dim(), p.dim())?;
            neg_eta.mul(&hessian(p, point)?)
        })
        .collect::<Result<_>>()?;
    Ok(WeingartenSet {
        point: point.to_vec(),
        operators,
    })
}

/// Max-norm of `A_α A_β − A_β A_α` over `α < β`; indices reported as `[α, β, i, j]`.
pub fn weingarten_commutator_defect<S: Scalar>(w: &WeingartenSet<S>) -> ResidualReport<S> {
    let mut report = ResidualReport::zero("weingarten_commutator", &w.point);
    let ops = &w.operators;
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            let ab = ops[a].mul(&ops[b]).expect("square operators");
            let ba = ops[b].mul(&ops[a]).expect("square operators");
            let d = ab.sub(&ba).expect("same shape");
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    let v = d[(i, j)].abs();
                    if v > report.value {
                        report.value = v;
                        report.worst_indices = vec![a, b, i, j];
                    }
                }
            }
        }
    }
    report
}
