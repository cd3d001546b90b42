use proptest::prelude::*;

use semigroup_lab::cole_hopf::{
    cole_hopf_transform, exact, gauge_check, inverse_cole_hopf, FieldSeries, GaugeFunction, Grid1D, GridFunction1D,
};
use semigroup_lab::evolution::{build_family, check_group_axioms, Coefficient, DifferenceScheme, GeneratorSpec};
use semigroup_lab::logrep::{log_representation_with, KappaShift, LogRepConfig};
use semigroup_lab::nonlinear_emergence::{identity_residual, EvalWindow, Field, Identity, SmoothPair};
use semigroup_lab::operator_core::{mat_exp, mat_inv, mat_log_principal, op_norm, spectrum_of, C64};
use semigroup_lab::spectral_x::{
    resolvent_bound_check, subordinated_semigroup_apply, FrequencyGrid, ResolventProbe, TimeSamples,
};
use semigroup_lab::DenseOperator;

fn matrix(max_dim: usize, norm: f64) -> impl Strategy<Value = DenseOperator> {
    (1..=max_dim).prop_flat_map(move |n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |entries| {
            let m = DenseOperator::new(n, entries.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap();
            let size = op_norm(&m);
            if size > 0.0 {
                m.scale_real(norm / size)
            } else {
                m
            }
        })
    })
}

fn real_matrix(max_dim: usize, norm: f64) -> impl Strategy<Value = DenseOperator> {
    (1..=max_dim).prop_flat_map(move |n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |entries| {
            let m = DenseOperator::from_real(n, &entries).unwrap();
            let size = op_norm(&m);
            if size > 0.0 {
                m.scale_real(norm / size)
            } else {
                m
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_inverts_exp_in_the_principal_strip(m in matrix(5, 2.5)) {
        // ||M|| < pi keeps every eigenvalue inside the strip |Im| < pi.
        let back = mat_log_principal(&mat_exp(&m).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&m) < 1e-10, "{}", back.max_abs_diff(&m));
    }

    #[test]
    fn log_lands_in_the_strip(m in matrix(4, 6.0)) {
        if let Ok(l) = mat_log_principal(&mat_exp(&m).unwrap()) {
            for z in spectrum_of(&l).unwrap().eigenvalues {
                prop_assert!(z.im.abs() <= std::f64::consts::PI + 1e-8);
            }
        }
    }

    #[test]
    fn exp_of_commuting_sum(m in matrix(5, 2.0), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let lhs = &mat_exp(&m.scale_real(a)).unwrap() * &mat_exp(&m.scale_real(b)).unwrap();
        let rhs = mat_exp(&m.scale_real(a + b)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn inverse_is_an_involution(m in matrix(5, 1.0)) {
        let a = m.shift(C64::new(3.0, 0.0));
        let back = mat_inv(&mat_inv(&a).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn modulated_families_obey_group_laws(
        m in real_matrix(4, 2.0),
        kind in 0usize..3,
        c in -1.5f64..1.5,
        triples in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 10),
    ) {
        let coefficient = [Coefficient::Const(c), Coefficient::Linear(c), Coefficient::Sin(c)][kind];
        let family = build_family(GeneratorSpec::modulated(coefficient, m, "t"), 1.0).unwrap();
        let r = check_group_axioms(&family, &triples);
        prop_assert!(r.pass, "{:?}", r.residuals);
    }

    #[test]
    fn generator_estimate_is_second_order(m in real_matrix(3, 1.5), t in -0.5f64..0.5) {
        let family = build_family(GeneratorSpec::constant(m, "t"), 1.0).unwrap();
        let p = family.point(t);
        let k = KappaShift::real(1.0).unwrap();
        let err = |h: f64| {
            log_representation_with(&family, &p, &p, k, &LogRepConfig::with_step(h))
                .unwrap()
                .residual_vs_true
                .unwrap()
        };
        let (coarse, fine) = (err(1e-2), err(5e-3));
        // error ~ h^2 unless already at rounding level
        prop_assert!(coarse < 1e-9 || coarse / fine > 3.0, "{coarse} {fine}");
    }

    #[test]
    fn kappa_does_not_change_the_generator(m in real_matrix(4, 2.0), t in -0.5f64..0.5) {
        let family = build_family(GeneratorSpec::constant(m, "t"), 1.0).unwrap();
        let p = family.point(t);
        let cfg = LogRepConfig { scheme: DifferenceScheme::Richardson, ..LogRepConfig::with_step(1e-3) };
        let kappas = [C64::new(0.3, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 1.0)];
        let estimates: Vec<DenseOperator> = kappas
            .iter()
            .map(|&k| log_representation_with(&family, &p, &p, KappaShift::new(k).unwrap(), &cfg).unwrap().generator_estimate)
            .collect();
        for a in &estimates {
            for b in &estimates {
                prop_assert!(a.max_abs_diff(b) < 1e-8);
            }
        }
    }

    #[test]
    fn transform_scales_exactly_with_mu(a in -2.0f64..2.0, b in 0.1f64..3.0, shift in -1.0f64..1.0) {
        let g = Grid1D::new(3.0, 64).unwrap();
        let u = GridFunction1D::from_fn(g, |x| b + (a * x + shift).exp()).unwrap();
        let one = cole_hopf_transform(&u, 1.0).unwrap();
        let four = cole_hopf_transform(&u, 4.0).unwrap();
        for (p, q) in one.values().iter().zip(four.values()) {
            prop_assert_eq!(0.5 * p, *q);
        }
    }

    #[test]
    fn positive_constant_factors_do_not_move_psi(c in 1e-3f64..1e3, t0 in 0.0f64..1.0) {
        let g = Grid1D::new(4.0, 128).unwrap();
        let u = GridFunction1D::from_fn(g, |x| exact::shock_heat(t0, x)).unwrap();
        let scaled = GridFunction1D::from_fn(g, |x| c * exact::shock_heat(t0, x)).unwrap();
        let d = cole_hopf_transform(&u, 1.0).unwrap().max_abs_diff(&cole_hopf_transform(&scaled, 1.0).unwrap());
        prop_assert!(d <= 1e-12);
    }

    #[test]
    fn gauges_leave_the_transform_alone(kind in 0usize..3, c in -3.0f64..3.0) {
        let g = Grid1D::new(4.0, 128).unwrap();
        let u = FieldSeries::sample(g, 0.0, 0.1, 10, exact::shock_heat).unwrap();
        let gauge = [GaugeFunction::Const(c), GaugeFunction::Sin(c), GaugeFunction::Poly(c)][kind];
        prop_assert!(gauge_check(&u, gauge, 1.0).unwrap().pass);
    }

    #[test]
    fn forward_after_inverse_is_identity(a in 0.2f64..1.5, t0 in -0.5f64..0.5) {
        let g = Grid1D::new(4.0, 400).unwrap();
        let psi = GridFunction1D::from_fn(g, |x| -a * (1.0 + ((x + t0) * a / 2.0).tanh())).unwrap();
        let back = cole_hopf_transform(&inverse_cole_hopf(&psi, 1.0, 1.0).unwrap(), 1.0).unwrap();
        prop_assert!(back.max_abs_diff(&psi) < 10.0 * g.dx().powi(2));
    }

    #[test]
    fn resolvent_supremum_is_bounded(re in 0.1f64..10.0, im in -20.0f64..20.0, mu in 0.1f64..10.0) {
        let g = FrequencyGrid::new(256, 0.2).unwrap();
        let r = resolvent_bound_check(&ResolventProbe::new(C64::new(re, im), mu).unwrap(), &g);
        prop_assert!(r.pass, "{:?}", r.residuals);
    }

    #[test]
    fn subordination_contracts(x in 0.1f64..2.0, seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32)) {
        let w0 = TimeSamples::new(0.0, 0.2, seed.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap();
        let w = subordinated_semigroup_apply(x, 1.0, &w0).unwrap();
        prop_assert!(w.l2_norm() <= w0.l2_norm() + 1e-8);
    }

    #[test]
    fn heat_pairs_satisfy_all_identities(
        c0 in 0.5f64..2.0,
        modes in prop::collection::vec((0.1f64..1.0, 0.2f64..1.5), 1..4),
    ) {
        // v = c0 + sum c_i exp(a_i x + a_i^2 t) with a_i > 0, so v > 0 and v_x > 0
        let v = modes
            .iter()
            .fold(Field::constant(c0), |f, &(c, a)| f + Field::exp(c, a, a * a));
        let w = EvalWindow::new((0.0, 1.0), (-1.0, 1.0), 9, 9).unwrap();
        let pair = SmoothPair::heat("random", v, w);
        for id in Identity::ALL {
            let r = identity_residual(id, &pair, &w).unwrap();
            prop_assert!(r.holds(), "{}: {} vs {}", id.name(), r.max_abs, r.scale);
        }
    }
}
