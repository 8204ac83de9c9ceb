#![allow(clippy::needless_range_loop)]

mod common;

use common::oracle::{self, q};
use common::{from_library, to_library};
use num_traits::Zero;
use proptest::prelude::*;
use wdvv_submanifolds::bonnet::{initial_frame, integrate_frame_with, Frame, SweepOptions};
use wdvv_submanifolds::frobenius::{invariance_residual, structure_constants, wdvv_tensor};
use wdvv_submanifolds::hydro::{EvolveConfig, GridState, HydroSystem};
use wdvv_submanifolds::linalg::Matrix;
use wdvv_submanifolds::potential::{
    eval_partial, gradient_potentials, hessian, invert_metric, third_tensor, MetricMatrix, MultiIndex,
    PolynomialPotential, ProblemSpec,
};
use wdvv_submanifolds::report::to_canonical_json;
use wdvv_submanifolds::submanifold::{codazzi_residual, reduction_check, FormField};
use wdvv_submanifolds::scalar::format_rational;
use wdvv_submanifolds::{Mode, Rational};

fn rows_json(m: &MetricMatrix) -> Vec<Vec<String>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| format_rational(m.get(i, j))).collect()).collect()
}

fn rat() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=7).prop_map(|(n, d)| q(n, d))
}

fn poly(dim: usize, max_exp: u32) -> impl Strategy<Value = PolynomialPotential> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, dim), rat()), 0..8).prop_map(move |terms| {
        let mut p = oracle::Poly::new(dim);
        for (e, c) in terms {
            let prev = p.terms.remove(&e).unwrap_or_default();
            let s = prev + c;
            if !s.is_zero() {
                p.terms.insert(e, s);
            }
        }
        to_library(&p)
    })
}

fn point(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rat(), dim)
}

fn metric(dim: usize) -> impl Strategy<Value = MetricMatrix> {
    prop::collection::vec(rat(), dim * (dim + 1) / 2).prop_filter_map("degenerate", move |upper| {
        let mut rows = vec![vec![Rational::zero(); dim]; dim];
        let mut it = upper.into_iter();
        for i in 0..dim {
            for j in i..dim {
                let v = it.next().unwrap();
                rows[i][j] = v.clone();
                rows[j][i] = v;
            }
        }
        MetricMatrix::from_rows(rows).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn evaluation_agrees_with_oracle(p in poly(3, 3), x in point(3)) {
        prop_assert_eq!(p.eval::<Rational>(&x).unwrap(), from_library(&p).eval(&x));
    }

    #[test]
    fn differentiation_is_linear(a in poly(3, 3), b in poly(3, 3), s in rat(), axis in 0usize..3) {
        let lhs = a.scale(&s).add(&b).unwrap().derivative(axis);
        let rhs = a.derivative(axis).scale(&s).add(&b.derivative(axis)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mixed_partials_commute(p in poly(3, 4), i in 0usize..3, j in 0usize..3, k in 0usize..3) {
        prop_assert_eq!(p.derivative(i).derivative(j).derivative(k), p.derivative(k).derivative(i).derivative(j));
        let mut e = vec![0u32; 3];
        e[i] += 1;
        e[j] += 1;
        prop_assert_eq!(p.partial(&MultiIndex::new(e)).unwrap(), p.derivative(j).derivative(i));
    }

    #[test]
    fn product_rule(a in poly(2, 2), b in poly(2, 2), x in point(2)) {
        let lhs = a.mul(&b).unwrap().derivative(0);
        let rhs = a.derivative(0).mul(&b).unwrap().add(&a.mul(&b.derivative(0)).unwrap()).unwrap();
        prop_assert_eq!(lhs.eval::<Rational>(&x).unwrap(), rhs.eval::<Rational>(&x).unwrap());
    }

    #[test]
    fn hessian_and_third_tensor_are_exactly_symmetric(p in poly(3, 4), x in point(3)) {
        let h = hessian::<Rational>(&p, &x).unwrap();
        prop_assert!(h.is_symmetric());
        let t = third_tensor::<Rational>(&p, &x).unwrap();
        for (idx, v) in t.iter_indexed() {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            for perm in [[j, i, k], [i, k, j], [k, j, i], [j, k, i], [k, i, j]] {
                prop_assert_eq!(t.get(&perm), v);
            }
            let order = MultiIndex::from_axes(3, &[i, j, k]);
            prop_assert_eq!(v, &eval_partial::<Rational>(&p, &order, &x).unwrap());
        }
    }

    #[test]
    fn metric_inversion_is_an_involution(m in metric(3)) {
        let inv = invert_metric(&m).unwrap();
        prop_assert_eq!(invert_metric(&inv).unwrap(), m.clone());
        prop_assert_eq!(inv.signature(), m.signature());
    }

    #[test]
    fn invariance_holds_for_any_potential_and_metric(p in poly(3, 4), m in metric(3), x in point(3)) {
        let eta = invert_metric(&m).unwrap();
        let c = structure_constants(&p, &m, &x).unwrap();
        prop_assert!(invariance_residual(&c, &eta).unwrap().is_zero());
    }

    #[test]
    fn low_degree_terms_do_not_change_wdvv(p in poly(3, 3), extra in poly(3, 1), x in point(3)) {
        // exponents ≤ 1 per variable with total degree ≤ 2 have vanishing third derivatives
        let low: Vec<_> = extra.terms().filter(|(m, _)| m.total_degree() <= 2).map(|(m, c)| (m.clone(), c.clone())).collect();
        let shifted = p.add(&PolynomialPotential::from_terms(3, low).unwrap()).unwrap();
        let anti = MetricMatrix::antidiagonal(3);
        prop_assert_eq!(wdvv_tensor::<Rational>(&p, &anti, &x).unwrap(), wdvv_tensor::<Rational>(&shifted, &anti, &x).unwrap());
    }

    #[test]
    fn wdvv_residual_scales_quadratically(p in poly(3, 3), s in rat(), x in point(3)) {
        let anti = MetricMatrix::antidiagonal(3);
        let w = wdvv_tensor::<Rational>(&p, &anti, &x).unwrap();
        let ws = wdvv_tensor::<Rational>(&p.scale(&s), &anti, &x).unwrap();
        for (idx, v) in w.iter_indexed() {
            prop_assert_eq!(ws.get(&idx), &(v * &s * &s));
        }
    }

    #[test]
    fn codazzi_vanishes_for_hessian_fields(psi in prop::collection::vec(poly(3, 4), 1..4), x in point(3)) {
        prop_assert!(codazzi_residual(&FormField::Hessians(psi), &x).unwrap().is_zero());
    }

    #[test]
    fn reduction_identity_holds_for_arbitrary_potentials(p in poly(3, 3), c in rat(), x in point(3)) {
        prop_assume!(!c.is_zero());
        let r = reduction_check(&p, &MetricMatrix::antidiagonal(3), &c, &[x]).unwrap();
        prop_assert!(r.holds());
    }

    #[test]
    fn problem_files_round_trip(p in poly(2, 3), m in metric(2)) {
        let text = format!(
            r#"{{"n": 2, "l": 2, "convention": "covariant", "eta": {}, "phi": {}}}"#,
            serde_json::to_string(&rows_json(&m)).unwrap(),
            serde_json::to_string(&wdvv_submanifolds::potential::poly_to_json(&p)).unwrap(),
        );
        let spec = ProblemSpec::from_json_str(&text, Mode::Rational).unwrap();
        let again = ProblemSpec::from_json_str(&serde_json::to_string(&spec.to_json()).unwrap(), Mode::Rational).unwrap();
        prop_assert_eq!(&again, &spec);
        prop_assert_eq!(to_canonical_json(&again.to_json()), to_canonical_json(&spec.to_json()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn equal_flows_commute_bitwise(base in prop::collection::vec(-0.5f64..0.5, 3), amp in 1e-3f64..1e-2, alpha in 0usize..3) {
        let phi = to_library(&oracle::perturbed(1, 10));
        let sys = HydroSystem::new(&gradient_potentials(&phi), &MetricMatrix::antidiagonal(3)).unwrap();
        let s = GridState::single_mode(16, &base, amp, 1).unwrap();
        prop_assert_eq!(sys.commutator_defect(&s, alpha, alpha, &EvolveConfig::new(1e-3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn reconstruction_is_equivariant_under_motions(
        skew in prop::collection::vec(-0.4f64..0.4, 15),
        shift in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let spec = common::load("golden.json", Mode::Float);
        let spec = spec.with_domain(wdvv_submanifolds::potential::Domain { grid: 3, ..spec.domain.clone() }).unwrap();
        let mut opts = SweepOptions::ascending(3);
        opts.substeps = 8;
        let plain = integrate_frame_with(&spec, &opts).unwrap();
        let g = plain.ambient_form().matrix().clone();
        let upper = |i: usize, j: usize| skew[i * (11 - i) / 2 + j - i - 1];
        let s = Matrix::from_fn(6, 6, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => upper(i, j),
            std::cmp::Ordering::Greater => -upper(j, i),
            std::cmp::Ordering::Equal => 0.0,
        });
        // Cayley transform of the G-skew K = G⁻¹S is G-orthogonal
        let k = g.inverse().unwrap().mul(&s).unwrap();
        let id = Matrix::<f64>::identity(6);
        let q = id.sub(&k).unwrap().inverse().unwrap().mul(&id.add(&k).unwrap()).unwrap();
        prop_assert!(q.transpose().mul(&g).unwrap().mul(&q).unwrap().sub(&g).unwrap().max_abs() < 1e-10);
        let start: Frame = initial_frame(spec.eta(), spec.mu()).0.transformed(&q, &shift);
        opts.initial = Some(start);
        let moved = integrate_frame_with(&spec, &opts).unwrap();
        for (u, f) in plain.nodes() {
            let idx: Vec<usize> = u.iter().enumerate().map(|(a, x)| plain.axis_coords(a).iter().position(|c| c == x).unwrap()).collect();
            prop_assert!(f.transformed(&q, &shift).distance(moved.frame(&idx)) < 1e-10);
        }
    }
}
