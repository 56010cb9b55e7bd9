use proptest::prelude::*;

use sl2coef::coeffs::{self, CoeffIndex, CoeffQuery};
use sl2coef::fourier::StepFunction;
use sl2coef::gammakit::ln_gamma;
use sl2coef::hyp2f1::{hyp2f1, hyp2f1_pfaff};
use sl2coef::params::ReprParams;
use sl2coef::whittaker::{self, WhittakerMethod, WhittakerQuery};
use sl2coef::{Error, C64};

fn cx(re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> impl Strategy<Value = C64> {
    (re, im).prop_map(|(r, i)| C64::new(r, i))
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hyp2f1_symmetric_in_a_b(a in cx(-3.0..3.0, -2.0..2.0), b in cx(-3.0..3.0, -2.0..2.0), c in cx(0.5..5.0, -1.0..1.0), z in -40.0..0.0f64) {
        let ab = hyp2f1(a, b, c, z).unwrap().value;
        let ba = hyp2f1(b, a, c, z).unwrap().value;
        prop_assert!((ab - ba).norm() <= 1e-10 * ab.norm().max(1.0), "{ab} {ba}");
    }

    #[test]
    fn hyp2f1_contiguous_in_c(a in cx(-3.0..3.0, -2.0..2.0), b in cx(-3.0..3.0, -2.0..2.0), c in cx(1.5..5.0, -1.0..1.0), z in -40.0..0.0f64) {
        let f = |c: C64| hyp2f1(a, b, c, z).unwrap().value;
        let t1 = c * (c - 1.0) * (z - 1.0) * f(c - 1.0);
        let t2 = c * (c - 1.0 - (c * 2.0 - a - b - 1.0) * z) * f(c);
        let t3 = (c - a) * (c - b) * z * f(c + 1.0);
        let scale = t1.norm() + t2.norm() + t3.norm();
        prop_assert!((t1 + t2 + t3).norm() <= 1e-10 * scale.max(1e-300), "{}", (t1 + t2 + t3).norm() / scale);
    }

    #[test]
    fn hyp2f1_pfaff_consistent(a in cx(-3.0..3.0, -2.0..2.0), b in cx(-3.0..3.0, -2.0..2.0), c in cx(0.5..5.0, -1.0..1.0), z in -40.0..0.0f64) {
        let direct = hyp2f1(a, b, c, z).unwrap().value;
        let pfaff = hyp2f1_pfaff(a, b, c, z).unwrap();
        prop_assert!((direct - pfaff).norm() <= 1e-9 * direct.norm().max(1.0), "{direct} {pfaff}");
    }

    #[test]
    fn ln_gamma_recurrence(z in cx(0.1..20.0, -10.0..10.0)) {
        let lhs = ln_gamma(z + 1.0).unwrap();
        let rhs = ln_gamma(z).unwrap() + z.ln();
        let d = lhs - rhs;
        let turns = (d.im / (2.0 * std::f64::consts::PI)).round();
        prop_assert!(d.re.abs() < 1e-12 * lhs.norm().max(1.0));
        prop_assert!((d.im - turns * 2.0 * std::f64::consts::PI).abs() < 1e-11 * lhs.norm().max(1.0));
    }

    #[test]
    fn whittaker_rho_sign_across_methods(nu in cx(-3.0..3.0, -1.0..1.0), rho in cx(-1.2..1.2, -1.5..1.5), t in 0.05..20.0f64) {
        let auto = whittaker::whittaker_w(WhittakerQuery::new(nu, rho, t)).unwrap();
        let ode = whittaker::whittaker_w_with(WhittakerQuery::new(nu, -rho, t), WhittakerMethod::OdeBackward).unwrap();
        prop_assume!(ode.est_rel_error <= whittaker::ACCEPT_REL_ERR);
        prop_assert!(rel(ode.value, auto.value) <= 1e-8, "{} {}", ode.value, auto.value);
    }

    #[test]
    fn coeff_transpose_symmetry(lambda in -3.0..3.0f64, eps in 0.0..1.0f64, m_off in -15i64..15, n_off in -15i64..15, x in 1.05..60.0f64) {
        // 𝔓ˡ_{mn} = (-1)^{m-n} 𝔓^{-ℓ-1}_{nm}, checked across routes
        let p = ReprParams::principal(lambda, eps);
        let dual = ReprParams::new(-p.ell - 1.0, eps);
        let lhs = coeffs::frak_p_hypergeometric(&CoeffQuery::new(p, CoeffIndex::new(m_off, n_off), x)).unwrap().value;
        let rhs = match coeffs::frak_p_gamma_average(&CoeffQuery::new(dual, CoeffIndex::new(n_off, m_off), x)) {
            Ok(r) => r.value,
            Err(Error::Accuracy { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let sign = if (m_off - n_off).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        prop_assert!((lhs - rhs * sign).norm() <= 1e-8 * lhs.norm().max(1e-12), "{lhs} {rhs}");
    }

    #[test]
    fn coeff_index_negation(lambda in -3.0..3.0f64, eps in 0.0..1.0f64, m_off in -15i64..15, n_off in -15i64..15, x in 1.05..60.0f64) {
        // 𝔓ˡ_{mn} = 𝔓ˡ_{-m,-n}
        let p = ReprParams::principal(lambda, eps);
        let neg = ReprParams::principal(lambda, -eps);
        let lhs = coeffs::frak_p_hypergeometric(&CoeffQuery::new(p, CoeffIndex::new(m_off, n_off), x)).unwrap().value;
        let rhs = match coeffs::frak_p_gamma_average(&CoeffQuery::new(neg, CoeffIndex::new(-m_off, -n_off), x)) {
            Ok(r) => r.value,
            Err(Error::Accuracy { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        prop_assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(1e-12), "{lhs} {rhs}");
    }

    #[test]
    fn step_function_csv_round_trip(width in 0.01..2.0f64, start in -50i64..50, vals in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 1..40)) {
        let cells: Vec<(f64, C64)> = vals
            .iter()
            .enumerate()
            .map(|(i, &(re, im))| ((start + i as i64) as f64 * width, C64::new(re, im)))
            .collect();
        let step = StepFunction { cell_width: width, cells };
        let mut buf = Vec::new();
        step.write_csv(&mut buf).unwrap();
        let back = StepFunction::from_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.cells.len(), step.cells.len());
        for (a, b) in back.cells.iter().zip(&step.cells) {
            prop_assert_eq!(a.1, b.1);
            prop_assert!((a.0 - b.0).abs() <= 1e-12 * b.0.abs().max(1.0));
        }
        prop_assert!((back.cell_width - width).abs() <= 1e-12 * width);
    }
}
