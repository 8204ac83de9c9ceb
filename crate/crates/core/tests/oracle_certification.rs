mod common;

use common::oracle::{self, antidiagonal, q, Poly};
use common::{from_library, load, random_point, to_library};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wdvv_submanifolds::frobenius::wdvv_tensor;
use wdvv_submanifolds::potential::{gradient_potentials, MetricMatrix};
use wdvv_submanifolds::submanifold::{gauss_tensor, ricci_tensor, ricci_to_wdvv_index, second_forms};
use wdvv_submanifolds::{Mode, Rational};

#[test]
fn golden_potential_is_certified_symbolically() {
    let comps = oracle::wdvv_components(&oracle::golden(), &antidiagonal(3));
    assert_eq!(comps.len(), 81);
    for (idx, p) in comps {
        assert!(p.is_zero(), "component {idx:?} = {p:?}");
    }
}

#[test]
fn perturbation_breaks_associativity_at_the_base_point() {
    let base = vec![q(1, 2); 3];
    for (n, d) in [(1, 100), (1, 10)] {
        let comps = oracle::wdvv_components(&oracle::perturbed(n, d), &antidiagonal(3));
        assert!(comps.iter().any(|(_, p)| !p.is_zero()));
        assert!(comps.iter().any(|(_, p)| !p.eval(&base).is_zero()));
    }
}

#[test]
fn fixture_files_hold_the_certified_potentials() {
    let cases = [
        ("golden.json", oracle::golden()),
        ("perturbed.json", oracle::perturbed(1, 100)),
        ("perturbed_01.json", oracle::perturbed(1, 10)),
    ];
    for (file, expect) in cases {
        let spec = load(file, Mode::Rational);
        assert_eq!(from_library(spec.phi().unwrap()), expect, "{file}");
        assert_eq!(spec.eta_inv(), &MetricMatrix::antidiagonal(3));
        assert_eq!(spec.domain.base, vec![q(1, 2); 3]);
    }
}

#[test]
fn library_wdvv_tensor_matches_symbolic_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let phi = oracle::perturbed(1, 100);
    let comps = oracle::wdvv_components(&phi, &antidiagonal(3));
    let lib = to_library(&phi);
    for _ in 0..5 {
        let x = random_point(&mut rng, 3);
        let w = wdvv_tensor::<Rational>(&lib, &MetricMatrix::antidiagonal(3), &x).unwrap();
        for (idx, p) in &comps {
            assert_eq!(w.get(idx), &p.eval(&x), "{idx:?}");
        }
    }
}

#[test]
fn ricci_is_wdvv_under_the_index_map_symbolically() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let eta = antidiagonal(3);
    for _ in 0..4 {
        let phi = common::random_poly(&mut rng, 3, 4, 10);
        let t = oracle::thirds(&phi);
        let w: std::collections::HashMap<[usize; 4], Poly> = oracle::wdvv_components(&phi, &eta).into_iter().collect();
        let c = q(-1, 3);
        let mu: Vec<Vec<Rational>> = eta.iter().map(|r| r.iter().map(|x| x * &c).collect()).collect();
        for p in 0..3 {
            for qq in 0..3 {
                for r in 0..3 {
                    for s in 0..3 {
                        let idx = [p, qq, r, s];
                        let ric = oracle::ricci_component(&t, &eta, idx);
                        assert!(ric.sub(&w[&ricci_to_wdvv_index(idx)]).is_zero(), "{idx:?}");
                        let g = oracle::gauss_component(&t, &mu, idx);
                        assert!(g.sub(&ric.scale(&c)).is_zero(), "{idx:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn library_gauss_and_ricci_match_symbolic_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let phi = common::random_poly(&mut rng, 3, 4, 12);
    let lib = to_library(&phi);
    let eta = antidiagonal(3);
    let t = oracle::thirds(&phi);
    let c = q(2, 1);
    let mu: Vec<Vec<Rational>> = eta.iter().map(|r| r.iter().map(|x| x * &c).collect()).collect();
    let x = random_point(&mut rng, 3);
    let forms = second_forms(&gradient_potentials(&lib), &x).unwrap();
    let anti = MetricMatrix::antidiagonal(3);
    let g = gauss_tensor(&forms, &anti.scaled(&c).unwrap()).unwrap();
    let r = ricci_tensor(&forms, &anti).unwrap();
    for (idx, v) in g.iter_indexed() {
        let idx: [usize; 4] = idx.try_into().unwrap();
        assert_eq!(v, &oracle::gauss_component(&t, &mu, idx).eval(&x));
        assert_eq!(r.get(&idx), &oracle::ricci_component(&t, &eta, idx).eval(&x));
    }
}
