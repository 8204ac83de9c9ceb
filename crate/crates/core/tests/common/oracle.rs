//! Standalone symbolic polynomials for certifying fixtures. Shares no code with
//! the library: own storage, own differentiation, own multiplication.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    pub dim: usize,
    pub terms: HashMap<Vec<u32>, Q>,
}

impl Poly {
    pub fn new(dim: usize) -> Self {
        Self { dim, terms: HashMap::new() }
    }

    pub fn from_list(dim: usize, list: &[(&[u32], i64, i64)]) -> Self {
        let mut p = Self::new(dim);
        for (e, n, d) in list {
            assert_eq!(e.len(), dim);
            p.push(e.to_vec(), q(*n, *d));
        }
        p
    }

    fn push(&mut self, e: Vec<u32>, c: Q) {
        let slot = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.push(e.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut r = Self::new(self.dim);
        for (e, c) in &self.terms {
            r.push(e.clone(), c * s);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::new(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                r.push(e, ca * cb);
            }
        }
        r
    }

    pub fn diff(&self, axis: usize) -> Self {
        let mut r = Self::new(self.dim);
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut f = e.clone();
                f[axis] -= 1;
                r.push(f, c * Q::from_integer(BigInt::from(e[axis])));
            }
        }
        r
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }
}

/// All third partials `Φ_{ijk}` as polynomials.
pub fn thirds(phi: &Poly) -> Vec<Vec<Vec<Poly>>> {
    let n = phi.dim;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| phi.diff(i).diff(j).diff(k)).collect())
                .collect()
        })
        .collect()
}

/// `W_{ijmn} = Σ Φ_{ijk} η^{kl} Φ_{lmn} − Φ_{imk} η^{kl} Φ_{ljn}`, fully expanded.
pub fn wdvv_components(phi: &Poly, eta_inv: &[Vec<Q>]) -> Vec<([usize; 4], Poly)> {
    let n = phi.dim;
    let t = thirds(phi);
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for m in 0..n {
                for nn in 0..n {
                    let mut acc = Poly::new(n);
                    for k in 0..n {
                        for l in 0..n {
                            if eta_inv[k][l].is_zero() {
                                continue;
                            }
                            let a = t[i][j][k].mul(&t[l][m][nn]);
                            let b = t[i][m][k].mul(&t[l][j][nn]);
                            acc = acc.add(&a.sub(&b).scale(&eta_inv[k][l]));
                        }
                    }
                    out.push(([i, j, m, nn], acc));
                }
            }
        }
    }
    out
}

/// `R_{pqrs} = Σ η^{ij}(Φ_{pir}Φ_{qjs} − Φ_{pis}Φ_{qjr})`: Ricci tensor of `ψ = ∇Φ`.
pub fn ricci_component(t: &[Vec<Vec<Poly>>], eta_inv: &[Vec<Q>], [p, qq, r, s]: [usize; 4]) -> Poly {
    let n = t.len();
    let mut acc = Poly::new(n);
    for i in 0..n {
        for j in 0..n {
            if eta_inv[i][j].is_zero() {
                continue;
            }
            let a = t[p][i][r].mul(&t[qq][j][s]);
            let b = t[p][i][s].mul(&t[qq][j][r]);
            acc = acc.add(&a.sub(&b).scale(&eta_inv[i][j]));
        }
    }
    acc
}

/// `G_{ijkl} = Σ μ^{αβ}(Φ_{αik}Φ_{βjl} − Φ_{αil}Φ_{βjk})` for `ψ = ∇Φ`.
pub fn gauss_component(t: &[Vec<Vec<Poly>>], mu_inv: &[Vec<Q>], [i, j, k, l]: [usize; 4]) -> Poly {
    let n = t.len();
    let mut acc = Poly::new(n);
    for a in 0..n {
        for b in 0..n {
            if mu_inv[a][b].is_zero() {
                continue;
            }
            let x = t[a][i][k].mul(&t[b][j][l]);
            let y = t[a][i][l].mul(&t[b][j][k]);
            acc = acc.add(&x.sub(&y).scale(&mu_inv[a][b]));
        }
    }
    acc
}

pub fn antidiagonal(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i + j == n - 1 { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn golden_terms() -> Vec<(&'static [u32], i64, i64)> {
    vec![(&[2, 0, 1], 1, 2), (&[1, 2, 0], 1, 2), (&[0, 2, 2], 1, 4), (&[0, 0, 5], 1, 60)]
}

pub fn golden() -> Poly {
    Poly::from_list(3, &golden_terms())
}

/// Golden potential plus `ε (u¹)² (u²)²`.
pub fn perturbed(num: i64, den: i64) -> Poly {
    let mut t = golden_terms();
    t.push((&[2, 2, 0], num, den));
    Poly::from_list(3, &t)
}
