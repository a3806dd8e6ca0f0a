//! Primal (upper) and dual (lower) trial pairs for the dissipation `E_η`,
//! evaluated in closed form.
//!
//! * Dual: any `(v, ψ)` with `∇·(A∇ψ) + ηΔv = 0` gives
//!   `E_η ≥ ∫fψ − (η/2)∫|∇ψ|² − (η/2)∫|∇v|²`.
//! * Primal: any `(v, w)` with `∇·(A∇v) − Δw = f` gives
//!   `E_η ≤ (η/2)∫|∇v|² + (1/2η)∫|∇w|²`.
//!
//! Every trial field here is linear in a scalar amplitude, so the dual value
//! is a quadratic `aλ − bλ²` whose maximizer `a/(2b)` is computed exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::harmonics::{
    flux_jump, plasmon_wave, single_layer_solve, Band, LayerDensity, LayeredHarmonicField, Mode,
    Parity, RadialProfile,
};
use crate::numerics::{binomial, circle_angles, smallest_power_below};
use crate::radial::{energy, Core, RadialConfig, SourceSpectrum};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualTerms {
    /// `∫ f ψ`
    pub coupling: f64,
    /// `−(η/2)∫|∇ψ|²`
    pub psi: f64,
    /// `−(η/2)∫|∇v|²`
    pub v: f64,
}

impl DualTerms {
    pub fn total(&self) -> f64 {
        self.coupling + self.psi + self.v
    }
}

/// `J(λ) = aλ − b_ψ λ² − b_v λ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualQuadratic {
    pub a: f64,
    pub b_psi: f64,
    pub b_v: f64,
}

impl DualQuadratic {
    pub fn b(&self) -> f64 {
        self.b_psi + self.b_v
    }

    pub fn terms(&self, lambda: f64) -> DualTerms {
        DualTerms { coupling: self.a * lambda, psi: -self.b_psi * lambda * lambda, v: -self.b_v * lambda * lambda }
    }

    /// Exact maximizer `a/(2b)`.
    pub fn optimal_lambda(&self) -> f64 {
        if self.b() > 0.0 {
            self.a / (2.0 * self.b())
        } else {
            0.0
        }
    }

    /// `a²/(4b)`.
    pub fn optimum(&self) -> f64 {
        if self.b() > 0.0 {
            self.a * self.a / (4.0 * self.b())
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualKind {
    NoCore,
    WithCore,
}

/// Core geometry for the dual construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DualCore {
    /// `∂Σ = ∂B_1(0)`.
    Concentric,
    /// `∂Σ = ∂B_ρ(z0)` with `B_ρ(z0) ⊂ B_1(0)`.
    Shifted { rho: f64, z0: C64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub kind: DualKind,
    pub mode: Mode,
    pub eta: f64,
    /// Amplitude actually used for `J`.
    pub lambda: f64,
    pub lambda_optimal: f64,
    /// Fixed amplitude schedule, where one is defined (with-core case).
    pub lambda_schedule: Option<f64>,
    pub j: f64,
    pub j_schedule: Option<f64>,
    pub terms: DualTerms,
    pub quadratic: DualQuadratic,
    /// Max layer density of `∇·(A∇ψ) + ηΔv` on the breakpoints (scaled by λ).
    pub constraint_residual: f64,
    pub warning: Option<String>,
}

fn finish_dual(
    kind: DualKind,
    mode: Mode,
    eta: f64,
    quad: DualQuadratic,
    lambda: Option<f64>,
    lambda_schedule: Option<f64>,
    constraint_residual: f64,
    warning: Option<String>,
) -> DualCertificate {
    let lambda_optimal = quad.optimal_lambda();
    let lambda = lambda.unwrap_or(lambda_optimal);
    let terms = quad.terms(lambda);
    DualCertificate {
        kind,
        mode,
        eta,
        lambda,
        lambda_optimal,
        lambda_schedule,
        j: terms.total(),
        j_schedule: lambda_schedule.map(|l| quad.terms(l).total()),
        terms,
        quadratic: quad,
        constraint_residual,
        warning,
    }
}

fn check_radii(r_shell: f64, q: f64, eta: f64) -> Result<()> {
    if !(r_shell > 0.0) || !(q > r_shell) || !q.is_finite() {
        return Err(Error::InvalidGeometry(format!("need 0 < R < q, got R = {r_shell}, q = {q}")));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("loss eta must be positive, got {eta}")));
    }
    Ok(())
}

/// Dual certificate without a core: `v ≡ 0`, `ψ = λ ψ̂_k`.
pub fn dual_nocore(r_shell: f64, q: f64, k: u32, alpha: f64, eta: f64, lambda: Option<f64>) -> Result<DualCertificate> {
    check_radii(r_shell, q, eta)?;
    let mode = Mode::new(k, Parity::Even)?;
    let psi = plasmon_wave(k, r_shell)?;
    let quad = DualQuadratic {
        a: alpha * PI * q.powi(1 - k as i32) * r_shell.powi(2 * k as i32),
        b_psi: 0.5 * eta * psi.gradient_energy(None)?,
        b_v: 0.0,
    };
    let residual = flux_jump(&psi, &RadialProfile::coreless(r_shell)?, r_shell).max_amplitude();
    let warning = (alpha == 0.0).then(|| "alpha_k = 0: the certificate is trivially zero".to_string());
    Ok(finish_dual(DualKind::NoCore, mode, eta, quad, lambda, None, residual, warning))
}

/// Jump `∇·(A∇ψ̂_k)` on `∂B_ρ(z0)` (core `+1` inside, shell `−1` outside)
/// as a density about `z0`: `−(2k/ρ) Re(w (w + z0)^{k−1})`, `w = z − z0`.
pub fn core_jump_density(k: u32, rho: f64, z0: C64) -> Result<LayerDensity> {
    let mut modes = Vec::new();
    for j in 0..k {
        // coefficient of w^{j+1}
        let c = binomial(k as i64 - 1, j as i64) * crate::numerics::cpow(z0, (k - 1 - j) as i64) * (-2.0 * k as f64 / rho);
        let n = j + 1;
        let scale = rho.powi(n as i32);
        // Re(c ρ^n e^{inφ}) = ρ^n (Re c cos nφ − Im c sin nφ)
        modes.push((Mode::cos(n), C64::new(scale * c.re, 0.0)));
        if c.im != 0.0 {
            modes.push((Mode::sin(n), C64::new(-scale * c.im, 0.0)));
        }
    }
    LayerDensity::new(rho, z0, modes)
}

/// `k(η)`: smallest integer `k ≥ 1` with `R^{−k} < η`.
pub fn k_of_eta(r_shell: f64, eta: f64) -> Result<u32> {
    smallest_power_below(r_shell, eta)
}

/// Fixed amplitude schedule `λ = c₀ α_k (R/q)^k / (2 C₀ k)` with
/// `c₀ = π q` and `C₀ = π (R + 1)`.
pub fn schedule_lambda(r_shell: f64, q: f64, k: u32, alpha: f64) -> f64 {
    let c0 = PI * q;
    let big_c0 = PI * (r_shell + 1.0);
    c0 * alpha * (r_shell / q).powi(k as i32) / (2.0 * big_c0 * k as f64)
}

/// Dual certificate with a core: `ψ = λ ψ̂_k` and `v = (λ/η)·w`, where `w`
/// is the single layer of the jump of `ψ̂_k` on `∂Σ`.
pub fn dual_with_core(
    r_shell: f64,
    q: f64,
    eta: f64,
    spectrum: &SourceSpectrum,
    core: DualCore,
    k: Option<u32>,
    lambda: Option<f64>,
) -> Result<DualCertificate> {
    check_radii(r_shell, q, eta)?;
    if r_shell <= 1.0 {
        return Err(Error::InvalidGeometry(format!("shell radius R = {r_shell} must exceed the core radius 1")));
    }
    let (rho, z0) = match core {
        DualCore::Concentric => (1.0, C64::new(0.0, 0.0)),
        DualCore::Shifted { rho, z0 } => {
            if !(rho > 0.0 && z0.norm() + rho <= 1.0) {
                return Err(Error::InvalidGeometry(format!(
                    "shifted core B_rho(z0) must lie in the unit disc: rho = {rho}, |z0| = {}",
                    z0.norm()
                )));
            }
            (rho, z0)
        }
    };
    let k = match k {
        Some(k) if k >= 1 => k,
        Some(_) => return Err(Error::InvalidMode("k must be at least 1".into())),
        None => k_of_eta(r_shell, eta)?,
    };
    let mode = Mode::cos(k);
    let alpha = spectrum.amplitude(mode);
    let psi = plasmon_wave(k, r_shell)?;
    let density = core_jump_density(k, rho, z0)?;
    let layer = single_layer_solve(&density)?;
    // (η/2)∫|∇v|² with v = (λ/η)·layer
    let quad = DualQuadratic {
        a: alpha * PI * q.powi(1 - k as i32) * r_shell.powi(2 * k as i32),
        b_psi: 0.5 * eta * psi.gradient_energy(None)?,
        b_v: layer.gradient_energy(None)? / (2.0 * eta),
    };
    let residual = dual_core_residual(&psi, &layer, rho, z0);
    let warning = (alpha == 0.0)
        .then(|| format!("spectrum has no amplitude on mode k = {k}; the certificate is trivial"));
    let lambda_schedule = Some(schedule_lambda(r_shell, q, k, alpha));
    Ok(finish_dual(DualKind::WithCore, mode, eta, quad, lambda, lambda_schedule, residual, warning))
}

/// Pointwise `max |[ν·A∇ψ̂] − [ν·∇w]|` on the core circle: the jump of
/// `ψ̂` from its gradient, the jump of `w` from its layer representation.
fn dual_core_residual(psi: &LayeredHarmonicField, layer: &LayeredHarmonicField, rho: f64, z0: C64) -> f64 {
    let v_jump = flux_jump(layer, &RadialProfile::uniform(C64::new(1.0, 0.0)), rho);
    let mut worst: f64 = 0.0;
    for phi in circle_angles(256) {
        let nu = C64::from_polar(1.0, phi);
        let z = z0 + rho * nu;
        let (gx, gy) = psi.gradient(z);
        let dnu = (gx * nu.re + gy * nu.im).re;
        // A jumps from +1 (core) to −1 (shell)
        let psi_jump = -2.0 * dnu;
        // ∇·(A∇ψ) + ηΔv with v = w/η: layers psi_jump + [∂_ν w]
        worst = worst.max((psi_jump + v_jump.evaluate(phi).re).abs());
    }
    worst
}

/// Per-mode optimal dual certificates summed over the whole spectrum for a
/// concentric configuration (modes are orthogonal, so the optimal
/// amplitudes decouple).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiModeDual {
    pub j: f64,
    pub terms: DualTerms,
    pub per_mode: Vec<(Mode, f64)>,
    pub constraint_residual: f64,
}

pub fn dual_multimode(config: &RadialConfig) -> Result<MultiModeDual> {
    config.validate()?;
    let mut terms = DualTerms { coupling: 0.0, psi: 0.0, v: 0.0 };
    let mut per_mode = Vec::new();
    let mut residual: f64 = 0.0;
    for (mode, s) in config.source.entries() {
        let single = SourceSpectrum::single(mode.k(), s)?;
        let cert = match config.core {
            Core::None => dual_nocore(config.r_shell, config.q, mode.k(), s, config.eta, None)?,
            Core::Disk(r0) if r0 == 1.0 => {
                dual_with_core(config.r_shell, config.q, config.eta, &single, DualCore::Concentric, Some(mode.k()), None)?
            }
            Core::Disk(r0) => {
                return Err(Error::InvalidGeometry(format!("the dual construction needs a unit core, got r0 = {r0}")))
            }
        };
        terms.coupling += cert.terms.coupling;
        terms.psi += cert.terms.psi;
        terms.v += cert.terms.v;
        residual = residual.max(cert.constraint_residual);
        per_mode.push((mode, cert.j));
    }
    Ok(MultiModeDual { j: terms.total(), terms, per_mode, constraint_residual: residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimalTerms {
    /// `(η/2)∫|∇v^low|²`
    pub v_low: f64,
    /// `(η/2)∫|∇v^high|²`
    pub v_high: f64,
    /// `(1/2η)∫|∇w|²`
    pub w: f64,
}

impl PrimalTerms {
    pub fn total(&self) -> f64 {
        self.v_low + self.v_high + self.w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalCertificate {
    pub k_star: u32,
    pub eta: f64,
    pub i: f64,
    pub terms: PrimalTerms,
    pub lambdas: Vec<(Mode, f64)>,
    pub v: LayeredHarmonicField,
    pub w: LayeredHarmonicField,
    /// Max per-mode layer residual of `∇·(A∇v) − Δw − f` on all breakpoints.
    pub constraint_residual: f64,
}

/// `v̂_k`: `r^k` (core), `r^{−k}` (shell), `R^{−2k} r^k` (matrix),
/// `R^{−2k} q^{2k} r^{−k}` beyond `q`. `A`-harmonic across both interfaces.
fn v_hat_low(mode: Mode, r_shell: f64, q: f64) -> Result<LayeredHarmonicField> {
    let mut f = LayeredHarmonicField::new(C64::new(0.0, 0.0), vec![1.0, r_shell, q])?;
    let k = mode.k() as i32;
    let z = C64::new(0.0, 0.0);
    let rq = (q / r_shell).powi(k) * (1.0 / r_shell).powi(k);
    // normalized: plus·(r/pr)^k, minus·(mr/r)^k
    f.set_mode(
        mode,
        vec![
            Band::new(C64::new(1.0, 0.0), z),
            Band::new(z, C64::new(1.0, 0.0)),
            Band::new(C64::new(rq, 0.0), z),
            Band::new(z, C64::new(rq, 0.0)),
        ],
    )?;
    Ok(f)
}

/// Primal certificate for the concentric geometry.
///
/// Modes `k ≤ k*` use `λ_k v̂_k` (no correction needed); modes `k > k*` use
/// `λ_k V̂_k`, whose flux errors on the core and shell circles are absorbed
/// by `w`, the single layer of the residual densities. Without a core every
/// mode is treated as high and only the shell circle needs correcting.
/// `k_star` overrides the cutoff (`R^{−k*} < η`).
pub fn primal_radial(config: &RadialConfig, k_star: Option<u32>) -> Result<PrimalCertificate> {
    config.validate()?;
    let (r, q, eta) = (config.r_shell, config.q, config.eta);
    let (has_core, r0) = match config.core {
        Core::Disk(r0) => (true, r0),
        Core::None => (false, 1.0),
    };
    if has_core && r0 != 1.0 {
        return Err(Error::InvalidGeometry(format!("the primal construction needs a unit core, got r0 = {r0}")));
    }
    let k_star = if has_core {
        match k_star {
            Some(k) => k,
            None => smallest_power_below(r, eta)?,
        }
    } else {
        0
    };
    let bps = config.breakpoints();
    let mut v = LayeredHarmonicField::new(C64::new(0.0, 0.0), bps.clone())?;
    let mut w = LayeredHarmonicField::zero(C64::new(0.0, 0.0));
    let mut lambdas = Vec::new();
    let mut terms = PrimalTerms { v_low: 0.0, v_high: 0.0, w: 0.0 };
    for (mode, alpha) in config.source.entries() {
        let k = mode.k();
        let kf = k as f64;
        if k <= k_star {
            // λ_k v̂_k with λ_k = −α (q/2k) q^{−k} R^{2k}; fold the scale into the bands
            let lam = -alpha * q / (2.0 * kf) * (r * r / q).powi(k as i32);
            let field = v_hat_low(mode, r, q)?.scaled(C64::new(lam, 0.0));
            terms.v_low += 0.5 * eta * field.gradient_energy(None)?;
            lambdas.push((mode, lam));
            v = v.add(&field)?;
        } else {
            // λ_k V̂_k with λ_k = −α (q/2k) q^{−k}; stored normalized: λ_k q^k = −α q/2k
            let amp = -alpha * q / (2.0 * kf);
            lambdas.push((mode, amp * q.powi(-(k as i32))));
            let mut field = LayeredHarmonicField::new(C64::new(0.0, 0.0), bps.clone())?;
            let mut bands = Vec::new();
            for j in 0..=bps.len() {
                if j < bps.len() {
                    // plus·(r/bps[j])^k equals amp·(r/q)^k
                    bands.push(Band::new(C64::new(amp * (bps[j] / q).powi(k as i32), 0.0), C64::new(0.0, 0.0)));
                } else {
                    bands.push(Band::new(C64::new(0.0, 0.0), C64::new(amp, 0.0)));
                }
            }
            field.set_mode(mode, bands)?;
            terms.v_high += 0.5 * eta * field.gradient_energy(None)?;
            // residual layers of ∇·(A∇v^high): −2kλ at r = 1, 2kλR^{k−1} at R;
            // w solves Δw = that layer, i.e. −Δw = −layer
            let lam_r = amp * (r / q).powi(k as i32) / r; // λ_k R^{k−1}
            let shell_density = LayerDensity::new(r, C64::new(0.0, 0.0), vec![(mode, C64::new(-2.0 * kf * lam_r, 0.0))])?;
            w = w.add(&single_layer_solve(&shell_density)?)?;
            if has_core {
                let lam_1 = amp * q.powi(-(k as i32));
                let core_density = LayerDensity::new(1.0, C64::new(0.0, 0.0), vec![(mode, C64::new(2.0 * kf * lam_1, 0.0))])?;
                w = w.add(&single_layer_solve(&core_density)?)?;
            }
            v = v.add(&field)?;
        }
    }
    terms.w = w.gradient_energy(None)? / (2.0 * eta);
    let constraint_residual = primal_constraint_residual(config, &v, &w)?;
    Ok(PrimalCertificate { k_star, eta, i: terms.total(), terms, lambdas, v, w, constraint_residual })
}

/// Per-mode `|[ν·A∇v] − [ν·∇w] − f|` on every breakpoint, maximized.
fn primal_constraint_residual(config: &RadialConfig, v: &LayeredHarmonicField, w: &LayeredHarmonicField) -> Result<f64> {
    let a = config.lossless_profile();
    let one = RadialProfile::uniform(C64::new(1.0, 0.0));
    let mut worst: f64 = 0.0;
    let bps = config.breakpoints();
    let v = v.refined(&bps)?;
    let w = w.refined(&bps)?;
    for &b in &bps {
        let jv = flux_jump(&v, &a, b);
        let jw = flux_jump(&w, &one, b);
        for (mode, s) in config.source.entries() {
            let target = if b == config.q { s } else { 0.0 };
            let res = jv.amplitude(mode) - jw.amplitude(mode) - C64::new(target, 0.0);
            let scale = s.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(res.norm() / scale);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub eta: f64,
    pub j: f64,
    pub e: f64,
    pub i: f64,
    /// `(E − J)/E`
    pub lower_margin: f64,
    /// `(I − E)/E`
    pub upper_margin: f64,
}

impl SandwichReport {
    /// `J ≤ E ≤ I` up to `slack·E`.
    pub fn holds(&self, slack: f64) -> bool {
        self.e - self.j >= -slack * self.e && self.i - self.e >= -slack * self.e
    }
}

/// Evaluates `J ≤ E ≤ I` for one configuration.
pub fn sandwich_check(config: &RadialConfig) -> Result<SandwichReport> {
    let e = energy(config)?.e;
    let j = dual_multimode(config)?.j;
    let i = primal_radial(config, None)?.i;
    let rel = |x: f64| if e > 0.0 { x / e } else { x };
    Ok(SandwichReport { eta: config.eta, j, e, i, lower_margin: rel(e - j), upper_margin: rel(i - e) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nocore_closed_form_example() {
        let c = dual_nocore(1.5, 2.0, 1, 1.0, 1e-3, None).unwrap();
        assert!((c.quadratic.a - 2.25 * PI).abs() < 1e-12);
        assert!((c.quadratic.b() - 2.25e-3 * PI).abs() < 1e-15);
        assert!((c.j - 562.5 * PI).abs() / (562.5 * PI) < 1e-12);
        // grid search oracle
        let best = (0..=4000).map(|i| c.quadratic.terms(i as f64 * 0.25).total()).fold(f64::MIN, f64::max);
        assert!(best <= c.j * (1.0 + 1e-12) && best >= c.j * (1.0 - 1e-6));
        assert_eq!(dual_nocore(1.5, 2.0, 1, 1.0, 1e-3, Some(0.0)).unwrap().j, 0.0);
        assert!(c.constraint_residual == 0.0);
    }

    #[test]
    fn nocore_scales_inverse_eta() {
        let js: Vec<f64> = (2..=8).map(|d| dual_nocore(1.5, 2.0, 1, 1.0, 10f64.powi(-d), None).unwrap().j).collect();
        for w in js.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn core_dual_structure() {
        let spec = SourceSpectrum::algebraic(2.0, 60);
        let c = dual_with_core(2.0, 2.5, 0.5, &spec, DualCore::Concentric, None, None).unwrap();
        assert_eq!(c.mode.k(), 2);
        let expected_b = 0.5 * PI * 2.0 * 16.0 + PI * 2.0 / 0.5;
        assert!((c.quadratic.b() - expected_b).abs() < 1e-10);
        assert!(c.constraint_residual < 1e-12, "{}", c.constraint_residual);
        assert!(c.j >= c.j_schedule.unwrap());
        let e = energy(&RadialConfig::new(2.0, 2.5, Core::unit(), 0.5, spec.clone()).unwrap()).unwrap().e;
        assert!(c.j <= e);
        let zero = dual_with_core(2.0, 2.5, 0.5, &spec, DualCore::Concentric, None, Some(0.0)).unwrap();
        assert_eq!(zero.j, 0.0);
    }

    #[test]
    fn shifted_core_dual_matches_concentric_limit() {
        let spec = SourceSpectrum::algebraic(2.0, 60);
        let a = dual_with_core(2.0, 2.5, 1e-3, &spec, DualCore::Concentric, None, None).unwrap();
        let b = dual_with_core(2.0, 2.5, 1e-3, &spec, DualCore::Shifted { rho: 1.0, z0: C64::new(0.0, 0.0) }, None, None).unwrap();
        assert!((a.j - b.j).abs() <= 1e-12 * a.j);
        let s = dual_with_core(2.0, 2.5, 1e-3, &spec, DualCore::Shifted { rho: 0.9, z0: C64::new(0.05, 0.02) }, None, None).unwrap();
        assert!(s.constraint_residual < 1e-9, "{}", s.constraint_residual);
        assert!(s.j > 0.0);
    }

    #[test]
    fn primal_constraint_is_exact() {
        for core in [Core::unit(), Core::None] {
            for eta in [1e-1, 1e-4] {
                let cfg = RadialConfig::new(2.0, 3.0, core, eta, SourceSpectrum::algebraic(2.0, 30)).unwrap();
                let p = primal_radial(&cfg, None).unwrap();
                assert!(p.constraint_residual <= 1e-12, "{core:?} {eta}: {}", p.constraint_residual);
                assert!(p.i >= 0.0);
            }
        }
        let cfg = RadialConfig::new(2.0, 3.0, Core::unit(), 1e-2, SourceSpectrum::empty()).unwrap();
        assert_eq!(primal_radial(&cfg, None).unwrap().i, 0.0);
    }

    #[test]
    fn low_mode_field_is_a_harmonic() {
        let f = v_hat_low(Mode::cos(3), 2.0, 3.0).unwrap();
        let a = RadialProfile::core_shell(2.0).unwrap();
        assert!(flux_jump(&f, &a, 1.0).max_amplitude() < 1e-14);
        assert!(flux_jump(&f, &a, 2.0).max_amplitude() < 1e-14);
        let jq = flux_jump(&f, &RadialProfile::uniform(C64::new(1.0, 0.0)), 3.0);
        let expect = -(6.0 / 3.0) * 27.0 / 64.0;
        assert!((jq.amplitude(Mode::cos(3)).re - expect).abs() < 1e-13);
    }

    #[test]
    fn sandwich_holds_on_examples() {
        for (r, q, core) in [(2.0, 3.0, Core::unit()), (1.5, 2.5, Core::None), (2.0, 2.5, Core::unit())] {
            for eta in [1e-1, 1e-4] {
                let cfg = RadialConfig::new(r, q, core, eta, SourceSpectrum::algebraic(2.0, 60)).unwrap();
                let s = sandwich_check(&cfg).unwrap();
                assert!(s.holds(1e-10), "{r} {q} {core:?} {eta}: {s:?}");
            }
        }
        let cfg = RadialConfig::new(2.0, 3.0, Core::unit(), 1e-2, SourceSpectrum::empty()).unwrap();
        let s = sandwich_check(&cfg).unwrap();
        assert_eq!((s.j, s.e, s.i), (0.0, 0.0, 0.0));
    }

    #[test]
    fn k_of_eta_is_strict() {
        assert_eq!(k_of_eta(2.0, 0.5).unwrap(), 2);
        assert_eq!(k_of_eta(2.0, 0.25).unwrap(), 3);
    }
}
