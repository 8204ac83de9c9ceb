#![allow(dead_code, clippy::needless_range_loop)]

pub mod oracle;

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wdvv_submanifolds::potential::{MetricMatrix, MultiIndex, PolynomialPotential, ProblemSpec};
use wdvv_submanifolds::{Mode, Rational};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn load(name: &str, mode: Mode) -> ProblemSpec {
    ProblemSpec::from_json_file(&fixture_path(name), mode).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub const FIXTURES: [&str; 6] = [
    "quadratic.json",
    "golden.json",
    "perturbed.json",
    "perturbed_01.json",
    "circle.json",
    "cylinder.json",
];

pub fn to_library(p: &oracle::Poly) -> PolynomialPotential {
    PolynomialPotential::from_terms(p.dim, p.terms.iter().map(|(e, c)| (MultiIndex::new(e.clone()), c.clone()))).unwrap()
}

pub fn from_library(p: &PolynomialPotential) -> oracle::Poly {
    let mut out = oracle::Poly::new(p.dim());
    for (m, c) in p.terms() {
        out.terms.insert(m.exponents().to_vec(), c.clone());
    }
    out
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    oracle::q(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

/// Random polynomial in `dim` variables of total degree ≤ `degree`.
pub fn random_poly(rng: &mut ChaCha8Rng, dim: usize, degree: u32, terms: usize) -> oracle::Poly {
    let mut p = oracle::Poly::new(dim);
    for _ in 0..terms {
        let mut e = vec![0u32; dim];
        let total = rng.gen_range(0..=degree);
        for _ in 0..total {
            e[rng.gen_range(0..dim)] += 1;
        }
        let c = small_rational(rng);
        let prev = p.terms.remove(&e).unwrap_or_default();
        let sum = prev + c;
        if sum != Rational::default() {
            p.terms.insert(e, sum);
        }
    }
    p
}

pub fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| small_rational(rng)).collect()
}

/// Random symmetric nondegenerate rational matrix.
pub fn random_metric(rng: &mut ChaCha8Rng, dim: usize) -> MetricMatrix {
    loop {
        let mut rows = vec![vec![Rational::default(); dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                let v = if i == j || rng.gen_bool(0.5) { small_rational(rng) } else { Rational::default() };
                rows[i][j] = v.clone();
                rows[j][i] = v;
            }
        }
        if let Ok(m) = MetricMatrix::from_rows(rows) {
            return m;
        }
    }
}
