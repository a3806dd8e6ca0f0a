//! Property-based checks across modules.

use alr_core::certificates::{dual_nocore, sandwich_check};
use alr_core::harmonics::{interaction_coeff, shifted_trace_expansion};
use alr_core::plasmon_lab::{plasmon_root, sphere_flux_residual, SphericalPlasmonProblem};
use alr_core::radial::{energy, Core, RadialConfig, SourceSpectrum};
use alr_core::C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn radial_sandwich_holds(r in 1.2f64..2.5, dq in 0.2f64..2.0, log_eta in -6.0f64..-0.5, core in any::<bool>()) {
        let q = r + dq;
        let core = if core { Core::unit() } else { Core::None };
        let cfg = RadialConfig::new(r, q, core, 10f64.powf(log_eta), SourceSpectrum::algebraic(2.0, 30)).unwrap();
        let rep = sandwich_check(&cfg).unwrap();
        prop_assert!(rep.holds(1e-10), "{rep:?}");
    }

    #[test]
    fn dissipation_identity(r in 1.2f64..2.5, dq in 0.2f64..2.0, log_eta in -6.0f64..-0.5) {
        let cfg = RadialConfig::new(r, r + dq, Core::unit(), 10f64.powf(log_eta), SourceSpectrum::algebraic(1.5, 20)).unwrap();
        let rep = energy(&cfg).unwrap();
        prop_assert!(rep.identity_residual <= 1e-9, "{}", rep.identity_residual);
    }

    #[test]
    fn dual_optimum_dominates_every_amplitude(lambda in -50.0f64..50.0, k in 1u32..8, log_eta in -6.0f64..-1.0) {
        let eta = 10f64.powf(log_eta);
        let best = dual_nocore(1.5, 2.0, k, 1.0, eta, None).unwrap();
        let trial = dual_nocore(1.5, 2.0, k, 1.0, eta, Some(lambda)).unwrap();
        prop_assert!(trial.j <= best.j * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn shifted_expansion_reproduces_trace(k in 1u32..6, rho in 0.4f64..0.95, frac in 0.0f64..0.6, angle in 0.0f64..6.28, phi in 0.0f64..6.28) {
        let z0 = C64::from_polar(frac * rho, angle);
        let e = shifted_trace_expansion(k, rho, z0, 200, 1e-6).unwrap();
        let z = z0 + C64::from_polar(rho, phi);
        let exact = (z.powi(-(k as i32))).re;
        prop_assert!((e.evaluate(z) - exact).abs() <= e.tail_bound + 1e-12 * exact.abs().max(1.0));
    }

    #[test]
    fn interaction_vanishes_below_diagonal(m in 1u32..15, extra in 1u32..6, rho in 0.3f64..0.9) {
        let z0 = C64::new(0.2 * rho, 0.1 * rho);
        prop_assert_eq!(interaction_coeff(m, m + extra, rho, z0).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn sphere_residual_vanishes_only_at_root(n in 2u32..7, l in 1u32..12, radius in 0.2f64..3.0) {
        let root = plasmon_root(n, l);
        let p = SphericalPlasmonProblem::new(n, l, radius, root).unwrap();
        prop_assert!(sphere_flux_residual(&p).abs() <= 1e-12 * radius.powi(l as i32 - 1).max(1.0));
        let q = SphericalPlasmonProblem::new(n, l, radius, root + 0.1).unwrap();
        prop_assert!(sphere_flux_residual(&q).abs() > 0.0);
    }
}
