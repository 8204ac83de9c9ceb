//! Fundamental equations of flat torsionless submanifolds in flat coordinates.
//!
//! With `ω_{α,ij} = ∂²ψ_α/∂u^i∂u^j`:
//! - Gauss: `G_{ijkl} = Σ μ^{αβ}(ω_{α,ik}ω_{β,jl} − ω_{α,il}ω_{β,jk})`
//! - Ricci: `R_{αβkl} = Σ η^{ij}(ω_{α,ik}ω_{β,jl} − ω_{α,il}ω_{β,jk})`
//! - Codazzi: `∂_k ω_{α,ij} − ∂_j ω_{α,ik}`
//!
//! For `ψ_α = ∂Φ/∂u^α` and `μ^{αβ} = c·η^{αβ}` one has, entry by entry,
//! `G_{ijkl} = c·R_{ijkl}`, and `R_{pqrs} = W_{prsq}` where `W` is the WDVV
//! tensor of [`crate::frobenius::wdvv_tensor`]; see [`ricci_to_wdvv_index`].

pub use crate::report::ResidualReport;

use crate::error::{check_dim, GeomError, Result};
use crate::frobenius::wdvv_tensor;
use crate::linalg::{Matrix, Tensor};
use crate::potential::{gradient_potentials, hessian, third_tensor, MetricMatrix, PolynomialPotential};
use num_traits::Zero;

use crate::scalar::{Rational, Scalar};

/// The `L` second fundamental forms at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondFormSet<S> {
    pub point: Vec<S>,
    pub forms: Vec<Matrix<S>>,
}

impl<S: Scalar> SecondFormSet<S> {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn codim(&self) -> usize {
        self.forms.len()
    }

    fn at(&self, alpha: usize, i: usize, j: usize) -> &S {
        &self.forms[alpha][(i, j)]
    }
}

/// `ω_α = Hess(ψ_α)` at `point`.
pub fn second_forms<S: Scalar>(psi: &[PolynomialPotential], point: &[S]) -> Result<SecondFormSet<S>> {
    let forms = psi.iter().map(|p| hessian(p, point)).collect::<Result<_>>()?;
    Ok(SecondFormSet {
        point: point.to_vec(),
        forms,
    })
}

/// Gauss residual tensor `[i,j,k,l]`.
pub fn gauss_tensor<S: Scalar>(forms: &SecondFormSet<S>, mu_inv: &MetricMatrix) -> Result<Tensor<S>> {
    let (n, l) = (forms.dim(), forms.codim());
    check_dim("mu^{αβ}", l, mu_inv.dim())?;
    let mu: Matrix<S> = mu_inv.to_scalar();
    Ok(Tensor::from_fn(&[n, n, n, n], |idx| {
        let (i, j, k, ll) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = S::zero();
        for a in 0..l {
            for b in 0..l {
                let m = &mu[(a, b)];
                if m.is_zero() {
                    continue;
                }
                let t = forms.at(a, i, k).clone() * forms.at(b, j, ll).clone()
                    - forms.at(a, i, ll).clone() * forms.at(b, j, k).clone();
                acc = acc + m.clone() * t;
            }
        }
        acc
    }))
}

pub fn gauss_residual<S: Scalar>(forms: &SecondFormSet<S>, mu_inv: &MetricMatrix) -> Result<ResidualReport<S>> {
    Ok(ResidualReport::from_tensor("gauss", &gauss_tensor(forms, mu_inv)?, &forms.point))
}

/// Ricci residual tensor `[α,β,k,l]`.
pub fn ricci_tensor<S: Scalar>(forms: &SecondFormSet<S>, eta_inv: &MetricMatrix) -> Result<Tensor<S>> {
    let (n, l) = (forms.dim(), forms.codim());
    check_dim("eta^{ij}", n, eta_inv.dim())?;
    let eta: Matrix<S> = eta_inv.to_scalar();
    Ok(Tensor::from_fn(&[l, l, n, n], |idx| {
        let (a, b, k, ll) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                let e = &eta[(i, j)];
                if e.is_zero() {
                    continue;
                }
                let t = forms.at(a, i, k).clone() * forms.at(b, j, ll).clone()
                    - forms.at(a, i, ll).clone() * forms.at(b, j, k).clone();
                acc = acc + e.clone() * t;
            }
        }
        acc
    }))
}

pub fn ricci_residual<S: Scalar>(forms: &SecondFormSet<S>, eta_inv: &MetricMatrix) -> Result<ResidualReport<S>> {
    Ok(ResidualReport::from_tensor("ricci", &ricci_tensor(forms, eta_inv)?, &forms.point))
}

/// Source of second fundamental forms for the Codazzi check.
#[derive(Clone, Debug)]
pub enum FormField {
    /// `ω_α = Hess(ψ_α)`.
    Hessians(Vec<PolynomialPotential>),
    /// Arbitrary polynomial matrix fields `forms[α][i][j]` (need not be integrable).
    Explicit(Vec<Vec<Vec<PolynomialPotential>>>),
}

impl FormField {
    fn dims(&self) -> (usize, usize) {
        match self {
            FormField::Hessians(psi) => (psi.first().map_or(0, PolynomialPotential::dim), psi.len()),
            FormField::Explicit(f) => (f.first().map_or(0, Vec::len), f.len()),
        }
    }

    fn component(&self, alpha: usize, i: usize, j: usize) -> PolynomialPotential {
        match self {
            FormField::Hessians(psi) => psi[alpha].derivative(i).derivative(j),
            FormField::Explicit(f) => f[alpha][i][j].clone(),
        }
    }
}

/// Codazzi residual `[α,i,j,k]`: `∂_k ω_{α,ij} − ∂_j ω_{α,ik}`, differentiated
/// exactly. Identically zero for Hessian fields.
pub fn codazzi_residual<S: Scalar>(field: &FormField, point: &[S]) -> Result<ResidualReport<S>> {
    let (n, l) = field.dims();
    check_dim("evaluation point", n, point.len())?;
    if let FormField::Explicit(f) = field {
        for rows in f {
            check_dim("form rows", n, rows.len())?;
            for row in rows {
                check_dim("form columns", n, row.len())?;
            }
        }
    }
    let mut derivs: Vec<Vec<Vec<Vec<S>>>> = Vec::with_capacity(l);
    for a in 0..l {
        let mut da = vec![vec![Vec::with_capacity(n); n]; n];
        for (i, row) in da.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let w = field.component(a, i, j);
                for k in 0..n {
                    cell.push(w.derivative(k).eval(point)?);
                }
            }
        }
        derivs.push(da);
    }
    let t = Tensor::from_fn(&[l, n, n, n], |idx| {
        let (a, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        derivs[a][i][j][k].clone() - derivs[a][i][k][j].clone()
    });
    Ok(ResidualReport::from_tensor("codazzi", &t, point))
}

/// Index map from the Ricci tensor to the WDVV tensor in the potential case:
/// `R_{pqrs} = W_{prsq}`.
pub fn ricci_to_wdvv_index(idx: [usize; 4]) -> [usize; 4] {
    let [p, q, r, s] = idx;
    [p, r, s, q]
}

/// Outcome of the potential reduction identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionCheck<S> {
    /// Max over points of all entry-wise deviations.
    pub max_deviation: S,
    pub gauss_max: S,
    pub ricci_max: S,
    pub wdvv_max: S,
}

impl<S: Scalar> ReductionCheck<S> {
    pub fn holds(&self) -> bool {
        self.max_deviation.is_zero()
    }
}

/// Checks, at each point, with `ψ = ∇Φ` and `μ^{αβ} = c·η^{αβ}`:
/// - `G_{ijkl} = c·A_{ijkl}` (Gauss against the associativity tensor `A`,
///   `A_{mnkl} = Σ η^{ij}(Φ_{imk}Φ_{jnl} − Φ_{iml}Φ_{jnk})`),
/// - `R_{ijkl} = A_{ijkl}` (Ricci, from Hessians of the gradient potentials),
/// - `A_{pqrs} = W_{prsq}` (WDVV tensor in its original index layout).
pub fn reduction_check<S: Scalar>(
    phi: &PolynomialPotential,
    eta_inv: &MetricMatrix,
    c: &Rational,
    points: &[Vec<S>],
) -> Result<ReductionCheck<S>> {
    if c.is_zero() {
        return Err(GeomError::ZeroScale);
    }
    let n = phi.dim();
    check_dim("eta^{ij}", n, eta_inv.dim())?;
    let mu_inv = eta_inv.scaled(c)?;
    let psi = gradient_potentials(phi);
    let cs = S::from_rational(c);
    let eta: Matrix<S> = eta_inv.to_scalar();
    let mut out = ReductionCheck {
        max_deviation: S::zero(),
        gauss_max: S::zero(),
        ricci_max: S::zero(),
        wdvv_max: S::zero(),
    };
    let bump = |slot: &mut S, v: S| {
        if v > *slot {
            *slot = v;
        }
    };
    for x in points {
        let forms = second_forms(&psi, x)?;
        let g = gauss_tensor(&forms, &mu_inv)?;
        let r = ricci_tensor(&forms, eta_inv)?;
        let w = wdvv_tensor(phi, eta_inv, x)?;
        let t = third_tensor(phi, x)?;
        let assoc = Tensor::from_fn(&[n, n, n, n], |idx| {
            let (m, nn, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            let mut acc = S::zero();
            for i in 0..n {
                for j in 0..n {
                    let e = &eta[(i, j)];
                    if e.is_zero() {
                        continue;
                    }
                    acc = acc
                        + e.clone()
                            * (t.get(&[i, m, k]).clone() * t.get(&[j, nn, l]).clone()
                                - t.get(&[i, m, l]).clone() * t.get(&[j, nn, k]).clone());
                }
            }
            acc
        });
        bump(&mut out.gauss_max, g.max_abs());
        bump(&mut out.ricci_max, r.max_abs());
        bump(&mut out.wdvv_max, w.max_abs());
        for (idx, a) in assoc.iter_indexed() {
            let key = [idx[0], idx[1], idx[2], idx[3]];
            let dg = (g.get(&idx).clone() - cs.clone() * a.clone()).abs();
            let dr = (r.get(&idx).clone() - a.clone()).abs();
            let dw = (w.get(&ricci_to_wdvv_index(key)).clone() - a.clone()).abs();
            bump(&mut out.max_deviation, dg);
            bump(&mut out.max_deviation, dr);
            bump(&mut out.max_deviation, dw);
        }
    }
    Ok(out)
}
