//! Two-center boundary-matching solver for the exact field of an eccentric
//! core. Each region carries a truncated harmonic basis; continuity and flux
//! transmission are imposed mode by mode on the three interfaces by FFT
//! projection, and the dense system is solved directly.

use nalgebra::{DMatrix, DVector};
use rustfft::FftPlanner;

use super::EccentricConfig;
use crate::numerics::{circle_angles, condition_1norm, pow2_at_least};
use crate::{Error, Result, C64};

/// Largest accepted 1-norm condition number (after column scaling).
pub const GALERKIN_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    /// `((z−c)/s)^n`
    Hol,
    /// `(conj(z−c)/s)^n`
    AntiHol,
    /// `(s/(z−c))^n`
    HolInv,
    /// `(s/conj(z−c))^n`
    AntiHolInv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Basis {
    kind: Kind,
    center: C64,
    scale: f64,
    n: u32,
}

impl Basis {
    /// Value and normal derivative `∂_ν` for unit normal `nu`.
    fn eval(&self, z: C64, nu: C64) -> (C64, C64) {
        let w = z - self.center;
        let n = self.n as i32;
        let nf = self.n as f64;
        let (g, dg, anti) = match self.kind {
            Kind::Hol | Kind::AntiHol => {
                let x = if self.kind == Kind::Hol { w } else { w.conj() } / self.scale;
                if n == 0 {
                    (C64::new(1.0, 0.0), C64::new(0.0, 0.0), false)
                } else {
                    let p = x.powi(n - 1);
                    (p * x, p * (nf / self.scale), self.kind == Kind::AntiHol)
                }
            }
            Kind::HolInv | Kind::AntiHolInv => {
                let wc = if self.kind == Kind::HolInv { w } else { w.conj() };
                let p = (C64::new(self.scale, 0.0) / wc).powi(n);
                (p, -p * nf / wc, self.kind == Kind::AntiHolInv)
            }
        };
        let d = if anti { dg * nu.conj() } else { dg * nu };
        (g, d)
    }
}

/// Regions: core, shell, matrix, exterior.
const REGIONS: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Circle {
    center: C64,
    radius: f64,
    inner: usize,
    outer: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinSolution {
    pub config: EccentricConfig,
    pub order: usize,
    /// `E_η = (η/2)∫|∇u|²` from boundary-trace pairings.
    pub energy: f64,
    /// `−½ Im ∫_{∂B_q} F ū ds`.
    pub source_dissipation: f64,
    /// `|E − E_source| / E`.
    pub identity_residual: f64,
    pub condition: f64,
    /// Largest mismatch of the interface conditions at sample points,
    /// relative to the source amplitude.
    pub interface_residual: f64,
    basis: Vec<(usize, Basis)>,
    coefficients: Vec<C64>,
}

impl GalerkinSolution {
    fn region_of(&self, z: C64) -> usize {
        let c = &self.config;
        if (z - c.z0).norm() < c.rho {
            0
        } else if z.norm() < c.r_shell {
            1
        } else if z.norm() < c.q {
            2
        } else {
            3
        }
    }

    fn region_eval(&self, region: usize, z: C64, nu: C64) -> (C64, C64) {
        let mut out = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for ((r, b), c) in self.basis.iter().zip(&self.coefficients) {
            if *r == region {
                let (v, d) = b.eval(z, nu);
                out.0 += c * v;
                out.1 += c * d;
            }
        }
        out
    }

    /// Field value at a point.
    pub fn evaluate(&self, z: C64) -> C64 {
        self.region_eval(self.region_of(z), z, C64::new(1.0, 0.0)).0
    }
}

fn circles(config: &EccentricConfig) -> [Circle; 3] {
    let o = C64::new(0.0, 0.0);
    [
        Circle { center: config.z0, radius: config.rho, inner: 0, outer: 1 },
        Circle { center: o, radius: config.r_shell, inner: 1, outer: 2 },
        Circle { center: o, radius: config.q, inner: 2, outer: 3 },
    ]
}

fn basis_set(config: &EccentricConfig, m: u32) -> Vec<(usize, Basis)> {
    let o = C64::new(0.0, 0.0);
    let mut out = Vec::new();
    let mut push = |region: usize, kind: Kind, center: C64, scale: f64, from: u32| {
        for n in from..=m {
            out.push((region, Basis { kind, center, scale, n }));
        }
    };
    push(0, Kind::Hol, config.z0, config.rho, 0);
    push(0, Kind::AntiHol, config.z0, config.rho, 1);
    push(1, Kind::Hol, o, config.r_shell, 0);
    push(1, Kind::AntiHol, o, config.r_shell, 1);
    push(1, Kind::HolInv, config.z0, config.rho, 1);
    push(1, Kind::AntiHolInv, config.z0, config.rho, 1);
    push(2, Kind::Hol, o, config.q, 0);
    push(2, Kind::AntiHol, o, config.q, 1);
    push(2, Kind::HolInv, o, config.r_shell, 1);
    push(2, Kind::AntiHolInv, o, config.r_shell, 1);
    push(3, Kind::HolInv, o, config.q, 1);
    push(3, Kind::AntiHolInv, o, config.q, 1);
    out
}

fn coefficient(config: &EccentricConfig, region: usize) -> C64 {
    let a = if region == 1 { -1.0 } else { 1.0 };
    C64::new(a, config.eta)
}

/// Source layer `F(θ)` on `∂B_q`.
fn source_at(config: &EccentricConfig, theta: f64) -> f64 {
    config.source.entries().iter().map(|(m, a)| a * m.angular(theta)).sum()
}

/// Solves the transmission problem with `M` modes per basis family.
pub fn galerkin_solve(config: &EccentricConfig, order: usize) -> Result<GalerkinSolution> {
    config.validate()?;
    let m = order;
    if m == 0 || m > 400 {
        return Err(Error::InvalidParameter(format!("Galerkin order must lie in 1..=400, got {m}")));
    }
    if (config.source.max_k() as usize) > m {
        return Err(Error::InvalidParameter(format!(
            "order {m} cannot represent source modes up to k = {}",
            config.source.max_k()
        )));
    }
    let basis = basis_set(config, m as u32);
    let dim = basis.len();
    debug_assert_eq!(dim, 12 * m + 3);
    let circles = circles(config);
    let n_nodes = pow2_at_least(8 * m + 64);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_nodes);
    let rows_per_circle = 4 * m + 1;
    let mi = m as i64;

    let project = |samples: &mut Vec<C64>| {
        fft.process(samples);
        let inv = 1.0 / n_nodes as f64;
        samples.iter_mut().for_each(|x| *x *= inv);
    };
    let fourier = |coeffs: &[C64], n: i64| -> C64 { coeffs[n.rem_euclid(n_nodes as i64) as usize] };
    let flux_row = |n: i64| -> usize { if n < 0 { (n + mi) as usize } else { (n + mi - 1) as usize } };

    let mut a = DMatrix::<C64>::zeros(dim, dim);
    for (col, &(region, b)) in basis.iter().enumerate() {
        for (ci, circle) in circles.iter().enumerate() {
            let sign = if region == circle.outer {
                1.0
            } else if region == circle.inner {
                -1.0
            } else {
                continue;
            };
            let coef = coefficient(config, region) * sign * circle.radius;
            let (mut vals, mut flux): (Vec<C64>, Vec<C64>) = circle_angles(n_nodes)
                .map(|phi| {
                    let nu = C64::from_polar(1.0, phi);
                    b.eval(circle.center + circle.radius * nu, nu)
                })
                .unzip();
            project(&mut vals);
            project(&mut flux);
            let base = ci * rows_per_circle;
            for n in -mi..=mi {
                a[(base + (n + mi) as usize, col)] += fourier(&vals, n) * sign;
                if n != 0 {
                    a[(base + 2 * m + 1 + flux_row(n), col)] += fourier(&flux, n) * coef;
                }
            }
        }
    }
    let mut rhs = DVector::<C64>::zeros(dim);
    {
        let mut f: Vec<C64> = circle_angles(n_nodes).map(|t| C64::new(source_at(config, t), 0.0)).collect();
        project(&mut f);
        let base = 2 * rows_per_circle;
        for n in -mi..=mi {
            if n != 0 {
                rhs[base + 2 * m + 1 + flux_row(n)] = fourier(&f, n) * config.q;
            }
        }
    }

    // column scaling
    let mut scales = vec![1.0; dim];
    for (j, s) in scales.iter_mut().enumerate() {
        let mx = a.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if mx > 0.0 {
            *s = 1.0 / mx;
            a.column_mut(j).iter_mut().for_each(|z| *z *= *s);
        }
    }
    let condition = condition_1norm(&a);
    if !(condition <= GALERKIN_CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition, limit: GALERKIN_CONDITION_LIMIT });
    }
    let y = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::IllConditioned { condition: f64::INFINITY, limit: GALERKIN_CONDITION_LIMIT })?;
    let coefficients: Vec<C64> = y.iter().zip(&scales).map(|(c, s)| c * s).collect();

    let mut sol = GalerkinSolution {
        config: config.clone(),
        order: m,
        energy: 0.0,
        source_dissipation: 0.0,
        identity_residual: 0.0,
        condition,
        interface_residual: 0.0,
        basis,
        coefficients,
    };

    // trace pairings ∫_Ω |∇u|² = Re ∮_{∂Ω} ū ∂_n u ds
    let h = std::f64::consts::TAU / n_nodes as f64;
    let mut dirichlet = 0.0;
    let mut dissipation = 0.0;
    let mut worst: f64 = 0.0;
    let fmax = circle_angles(256).map(|t| source_at(config, t).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for (ci, circle) in circles.iter().enumerate() {
        for phi in circle_angles(n_nodes) {
            let nu = C64::from_polar(1.0, phi);
            let z = circle.center + circle.radius * nu;
            let (ui, di) = sol.region_eval(circle.inner, z, nu);
            let (uo, d_o) = sol.region_eval(circle.outer, z, nu);
            let ds = circle.radius * h;
            dirichlet += (ui.conj() * di).re * ds - (uo.conj() * d_o).re * ds;
            let target = if ci == 2 { source_at(config, phi) } else { 0.0 };
            if ci == 2 {
                dissipation += -0.5 * (target * uo.conj()).im * ds;
            }
            let jump = coefficient(config, circle.outer) * d_o - coefficient(config, circle.inner) * di;
            worst = worst.max((uo - ui).norm() / fmax).max((jump - target).norm() / fmax);
        }
    }
    debug_assert!(REGIONS == 4);
    sol.energy = 0.5 * config.eta * dirichlet;
    sol.source_dissipation = dissipation;
    sol.identity_residual = if sol.energy > 0.0 {
        (sol.energy - dissipation).abs() / sol.energy
    } else {
        dissipation.abs()
    };
    sol.interface_residual = worst;
    Ok(sol)
}
