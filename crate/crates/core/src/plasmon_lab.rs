//! Plasmonic eigenvalue checks: sphere interfaces in dimension `n ≥ 2` and
//! the flat interface between two half-spaces. Everything is algebraic in the
//! power-law and exponential profiles; no grids.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `ψ = r^l Y_l` inside `B_R`, `c r^{−l−n+2} Y_l` outside (continuity fixes
/// `c`); `epsilon` is the interior coefficient, the exterior one is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPlasmonProblem {
    pub n: u32,
    pub l: u32,
    pub radius: f64,
    pub epsilon: f64,
}

impl SphericalPlasmonProblem {
    pub fn new(n: u32, l: u32, radius: f64, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
        }
        if l < 1 {
            return Err(Error::InvalidMode("spherical-harmonic degree must be at least 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!("radius must be positive, got {radius}")));
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidParameter("epsilon must be finite".into()));
        }
        Ok(Self { n, l, radius, epsilon })
    }

    /// Exterior decay exponent `l + n − 2` (equal to `l` in the plane).
    pub fn exterior_exponent(&self) -> f64 {
        (self.l + self.n - 2) as f64
    }
}

/// Flux residual `−ε ∂_rψ|_{R⁻} + ∂_rψ|_{R⁺}`, as the coefficient of `Y_l`:
/// `−(ε l + l + n − 2) R^{l−1}`.
pub fn sphere_flux_residual(problem: &SphericalPlasmonProblem) -> f64 {
    let l = problem.l as f64;
    let rl1 = problem.radius.powi(problem.l as i32 - 1);
    let inner = l * rl1;
    let outer = -problem.exterior_exponent() * rl1;
    -problem.epsilon * inner + outer
}

/// Root of the flux residual in `ε`, located by bisection on `[lo, hi]`.
pub fn plasmon_root_bisection(n: u32, l: u32, radius: f64, lo: f64, hi: f64) -> Result<f64> {
    let f = |eps: f64| -> Result<f64> { Ok(sphere_flux_residual(&SphericalPlasmonProblem::new(n, l, radius, eps)?)) };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa * fb > 0.0 {
        return Err(Error::InvalidParameter(format!("no sign change of the residual on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * m.abs() {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// The residual's root `ε = −(l + n − 2)/l`.
pub fn plasmon_root(n: u32, l: u32) -> f64 {
    -((l + n - 2) as f64) / l as f64
}

/// The eigenvalue sequence `−l/(l+1)` quoted for three-dimensional spheres,
/// reported next to [`plasmon_root`] for comparison.
pub fn quoted_sphere_eigenvalue(l: u32) -> f64 {
    -(l as f64) / (l as f64 + 1.0)
}

/// Residuals `(harmonicity, flux)` of `ψ = e^{∓|ξ_n| x_n} e^{iξ_⊥·x_⊥}` across
/// `x_n = 0` with interior coefficient `ε = −1`. `xi_n` defaults to `|ξ_⊥|`.
///
/// `Δψ = (ξ_n² − ξ_⊥·ξ_⊥) ψ` on both sides; the flux residual is
/// `−ε ∂_nψ|_{0⁻} + ∂_nψ|_{0⁺} = −ε|ξ_n| − |ξ_n|`.
pub fn halfspace_plasmon_check(n: u32, xi_perp: &[f64], xi_n: Option<f64>) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    if xi_perp.len() != (n - 1) as usize {
        return Err(Error::InvalidParameter(format!(
            "tangential frequency needs {} components, got {}",
            n - 1,
            xi_perp.len()
        )));
    }
    let perp2: f64 = xi_perp.iter().map(|x| x * x).sum();
    let xn = xi_n.unwrap_or_else(|| perp2.sqrt()).abs();
    let harmonicity = xn * xn - perp2;
    let epsilon = -1.0;
    let flux = -epsilon * xn - xn;
    Ok((harmonicity, flux))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_dimensional_sphere_residual() {
        for l in 1..=10 {
            for r in [0.5, 1.0, 2.0] {
                let p = SphericalPlasmonProblem::new(3, l, r, -1.0).unwrap();
                let expected = -(r as f64).powi(l as i32 - 1);
                assert!((sphere_flux_residual(&p) - expected).abs() <= 1e-12 * expected.abs());
            }
        }
    }

    #[test]
    fn planar_residual_vanishes() {
        for l in 1..=10 {
            let p = SphericalPlasmonProblem::new(2, l, 1.7, -1.0).unwrap();
            assert_eq!(sphere_flux_residual(&p), 0.0);
        }
    }

    #[test]
    fn root_by_bisection() {
        for l in 1..=6 {
            let root = plasmon_root_bisection(3, l, 1.3, -10.0, -0.01).unwrap();
            assert!((root - plasmon_root(3, l)).abs() < 1e-12);
            assert!((root - quoted_sphere_eigenvalue(l)).abs() > 1e-3);
        }
        assert!((plasmon_root(3, 1) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn halfspace_examples() {
        assert_eq!(halfspace_plasmon_check(2, &[1.0], None).unwrap(), (0.0, 0.0));
        let (h, f) = halfspace_plasmon_check(5, &[1.0, 2.0, 0.0, 1.0], None).unwrap();
        assert!(h.abs() < 1e-14 && f == 0.0);
        let (h, _) = halfspace_plasmon_check(3, &[1.0, 1.0], Some(1.0)).unwrap();
        assert!(h.abs() > 0.5);
        assert!(halfspace_plasmon_check(3, &[1.0], None).is_err());
    }

    #[test]
    fn validation() {
        assert!(SphericalPlasmonProblem::new(1, 1, 1.0, -1.0).is_err());
        assert!(SphericalPlasmonProblem::new(3, 0, 1.0, -1.0).is_err());
        assert!(SphericalPlasmonProblem::new(3, 1, 0.0, -1.0).is_err());
    }
}
