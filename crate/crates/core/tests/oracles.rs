//! Cross-module oracle checks: independent solvers and certificates must
//! bracket each other.

use alr_core::certificates::{dual_with_core, DualCore};
use alr_core::eccentric::{admissibility, galerkin_solve, primal_certificate, EccentricConfig, EccentricOptions};
use alr_core::radial::{classify_resonance, decade_grid, energy, eta_sweep, Core, RadialConfig, SourceSpectrum, Verdict};
use alr_core::C64;

#[test]
fn galerkin_converges_and_sits_below_primal() {
    let cfg = EccentricConfig::new(2.0, 9.0, 1e-3, SourceSpectrum::algebraic(2.0, 12), 0.98, C64::new(0.01, 0.0)).unwrap();
    assert!(admissibility(&cfg).all());
    let a = galerkin_solve(&cfg, 24).unwrap();
    let b = galerkin_solve(&cfg, 34).unwrap();
    assert!((a.energy - b.energy).abs() <= 1e-6 * b.energy);
    assert!(b.identity_residual <= 1e-8);
    let p = primal_certificate(&cfg, EccentricOptions::default()).unwrap();
    assert!(b.energy <= p.i, "{} > {}", b.energy, p.i);
    assert!(p.constraint_residual <= 1e-8);
}

#[test]
fn galerkin_sits_above_shifted_core_dual() {
    let src = SourceSpectrum::algebraic(2.0, 12);
    let cfg = EccentricConfig::new(1.5, 2.5, 1e-2, src.clone(), 0.9, C64::new(0.05, 0.02)).unwrap();
    let g = galerkin_solve(&cfg, 40).unwrap();
    let d = dual_with_core(1.5, 2.5, 1e-2, &src, DualCore::Shifted { rho: 0.9, z0: C64::new(0.05, 0.02) }, None, None).unwrap();
    assert!(d.j <= g.energy * (1.0 + 1e-10), "{} > {}", d.j, g.energy);
}

#[test]
fn galerkin_concentric_matches_exact_energy() {
    let src = SourceSpectrum::algebraic(2.0, 10);
    let cfg = EccentricConfig::new(1.4, 2.2, 1e-3, src.clone(), 1.0, C64::new(0.0, 0.0)).unwrap();
    let g = galerkin_solve(&cfg, 20).unwrap();
    let e = energy(&RadialConfig::new(1.4, 2.2, Core::unit(), 1e-3, src).unwrap()).unwrap();
    assert!((g.energy - e.e).abs() <= 1e-10 * e.e);
}

#[test]
fn sources_beyond_the_critical_radius_stay_bounded() {
    // q > R³ with a finite spectrum: E_η → 0 like η
    let cfg = RadialConfig::new(1.5, 4.0, Core::unit(), 0.1, SourceSpectrum::algebraic(2.0, 20)).unwrap();
    let series = eta_sweep(&cfg, &decade_grid(1, 6)).unwrap();
    let c = classify_resonance(&series);
    assert_ne!(c.verdict, Verdict::Resonant);
    assert!((c.slope - 1.0).abs() < 0.05, "{}", c.slope);
}
