//! Non-concentric circular core `Σ = B_ρ(z0)`: the primal (non-resonance)
//! construction and a two-center Galerkin oracle for the exact field.
//!
//! The primal trial field starts from the concentric low-frequency field
//! `V = Σ λ_k ṽ_k`, which agrees with the concentric `v̂_k` outside `Σ` and
//! is the harmonic extension of its trace inside. Its flux error on `∂Σ`,
//! `F = Re Σ μ_m (z − z0)^m`, is split at `m*`: low frequencies are cancelled
//! with perfect plasmon waves of the shell, high frequencies are absorbed by
//! a single layer `w`.

mod galerkin;

pub use galerkin::{galerkin_solve, GalerkinSolution};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::harmonics::{
    interaction_coeff, shifted_trace_expansion, single_layer_solve, Band, LayerDensity,
    LayeredHarmonicField, Mode, Parity, Side,
};
use crate::numerics::{binomial, circle_angles, cpow, pow2_at_least};
use crate::radial::SourceSpectrum;
use crate::{Error, Result, C64};

/// Largest expansion order accepted before refusing.
pub const MAX_ORDER: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EccentricConfig {
    pub r_shell: f64,
    pub q: f64,
    pub eta: f64,
    pub source: SourceSpectrum,
    pub rho: f64,
    pub z0: C64,
}

impl EccentricConfig {
    pub fn new(r_shell: f64, q: f64, eta: f64, source: SourceSpectrum, rho: f64, z0: C64) -> Result<Self> {
        let cfg = Self { r_shell, q, eta, source, rho, z0 };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Geometry checks: `0 ∈ B_ρ(z0) ⊆ B_1(0)`, `1 < R < q`, `η > 0`.
    /// `ρ = 1, z0 = 0` (the concentric limit) is accepted.
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidGeometry(format!("core radius must lie in (0, 1], got {}", self.rho)));
        }
        if !(self.z0.norm() < self.rho) {
            return Err(Error::InvalidGeometry(format!(
                "core must contain the origin: |z0| = {} >= rho = {}",
                self.z0.norm(),
                self.rho
            )));
        }
        if self.z0.norm() + self.rho > 1.0 {
            return Err(Error::InvalidGeometry(format!(
                "core must lie in the unit disc: |z0| + rho = {} > 1",
                self.z0.norm() + self.rho
            )));
        }
        if !(self.r_shell > 1.0 && self.q > self.r_shell && self.q.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "need 1 < R < q, got R = {}, q = {}",
                self.r_shell, self.q
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("loss eta must be positive, got {}", self.eta)));
        }
        if !self.source.l1_norm().is_finite() {
            return Err(Error::InvalidParameter("source spectrum must be absolutely summable".into()));
        }
        Ok(())
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        Self { eta, ..self.clone() }
    }

    /// Complex weights `a_k` with `λ_k r^{-k}{cos, sin}(kθ) = Re(a_k z^{-k})`,
    /// `λ_k = −α_k (q/2k) q^{−k} R^{2k}`.
    fn weights(&self) -> Vec<(Mode, f64, C64)> {
        self.source
            .entries()
            .into_iter()
            .map(|(mode, alpha)| {
                let k = mode.k() as f64;
                let lam = -alpha * self.q / (2.0 * k) * (self.r_shell * self.r_shell / self.q).powi(mode.k() as i32);
                let a = match mode.parity() {
                    Parity::Even => C64::new(lam, 0.0),
                    Parity::Odd => C64::new(0.0, lam),
                };
                (mode, lam, a)
            })
            .collect()
    }
}

/// The three sufficient conditions of the non-resonance construction, with
/// their slacks (positive = satisfied).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    /// `q − R³`
    pub source_slack: f64,
    /// `(1−ε₁)^{−2}(ε₀ + R²/q)` with `ε₀ = |z0|`, `ε₁ = 1 − ρ`.
    pub decay_lhs: f64,
    /// `1/R`
    pub decay_rhs: f64,
    /// `R − (1 + ε₀)`
    pub shell_slack: f64,
    pub source_ok: bool,
    pub decay_ok: bool,
    pub shell_ok: bool,
}

impl Admissibility {
    pub fn all(&self) -> bool {
        self.source_ok && self.decay_ok && self.shell_ok
    }
}

pub fn admissibility(config: &EccentricConfig) -> Admissibility {
    let (r, q) = (config.r_shell, config.q);
    let eps0 = config.z0.norm();
    let eps1 = 1.0 - config.rho;
    let decay_lhs = (eps0 + r * r / q) / (1.0 - eps1).powi(2);
    let decay_rhs = 1.0 / r;
    let source_slack = q - r.powi(3);
    let shell_slack = r - (1.0 + eps0);
    Admissibility {
        source_slack,
        decay_lhs,
        decay_rhs,
        shell_slack,
        source_ok: source_slack > 0.0,
        decay_ok: decay_lhs < decay_rhs,
        shell_ok: shell_slack >= 0.0,
    }
}

/// `V` as two pieces: an origin-centered field valid outside `Σ` and the
/// coefficients `C_m` of `Re Σ C_m (z − z0)^m` inside.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCenterField {
    pub outside: LayeredHarmonicField,
    pub inside: Vec<C64>,
    pub z0: C64,
    pub rho: f64,
    /// Bound on the truncation error of `inside` on `Σ̄`.
    pub tail_bound: f64,
}

fn horner(coeffs: &[C64], w: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * w + p;
        p = p * w + c;
    }
    (p, dp)
}

impl TwoCenterField {
    /// Value of the interior expansion and its normal derivative `∂_ν` at the
    /// point `z0 + ρ e^{iφ}` (radially about `z0`).
    pub fn inside_trace(&self, phi: f64) -> (f64, f64) {
        let nu = C64::from_polar(1.0, phi);
        let w = self.rho * nu;
        let (p, dp) = horner(&self.inside, w);
        (p.re, (dp * nu).re)
    }

    pub fn evaluate(&self, z: C64) -> f64 {
        if (z - self.z0).norm() < self.rho {
            horner(&self.inside, z - self.z0).0.re
        } else {
            self.outside.evaluate(z).re
        }
    }
}

/// Bound on `Σ_{m>M} |μ_m| ρ^m` from `|λ_k| ≤ (q/2)‖α‖_∞ Q^k / k`, `Q = R²/q`.
fn mu_tail_majorant(config: &EccentricConfig, order: usize) -> f64 {
    let amax = config.source.sup_norm();
    if amax == 0.0 {
        return 0.0;
    }
    let qq = config.r_shell * config.r_shell / config.q;
    let e = config.z0.norm();
    let rho = config.rho;
    let t = (e + qq) / rho;
    if t >= 1.0 {
        return f64::INFINITY;
    }
    let m = order as f64;
    let geo = t.powf(m + 1.0) / (1.0 - t);
    let weighted = t.powf(m + 1.0) * ((m + 1.0) - m * t) / (1.0 - t).powi(2);
    0.5 * config.q * amax * (geo / rho + weighted * qq / (rho * (e + qq)))
}

fn v_inside_tail(config: &EccentricConfig, order: usize) -> Result<f64> {
    let mut tail = 0.0;
    for (mode, _, a) in config.weights() {
        let e = shifted_trace_expansion(mode.k(), config.rho, config.z0, order as u32, f64::INFINITY)?;
        tail += a.norm() * e.tail_bound;
    }
    Ok(tail)
}

/// Smallest order `M ≥ K` with both truncation tails below `tolerance`.
pub fn auto_order(config: &EccentricConfig, tolerance: f64) -> Result<usize> {
    let k_max = config.source.max_k() as usize;
    let mut m = k_max.max(8);
    while m <= MAX_ORDER {
        if mu_tail_majorant(config, m) <= tolerance && v_inside_tail(config, m)? <= tolerance {
            return Ok(m);
        }
        m += 8;
    }
    Err(Error::Truncation {
        order: MAX_ORDER,
        tail: mu_tail_majorant(config, MAX_ORDER),
        tolerance,
    })
}

/// Builds `V = Σ λ_k ṽ_k` truncated at order `M`.
pub fn build_v(config: &EccentricConfig, order: usize, tolerance: f64) -> Result<TwoCenterField> {
    config.validate()?;
    if order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("order {order} exceeds {MAX_ORDER}")));
    }
    let (r, q) = (config.r_shell, config.q);
    let mut outside = LayeredHarmonicField::with_excised_core(C64::new(0.0, 0.0), vec![r, q])?;
    let mut inside = vec![C64::new(0.0, 0.0); order + 1];
    let mut tail = 0.0;
    for (mode, lam, a) in config.weights() {
        let k = mode.k() as i32;
        // shell r^{-k}, matrix R^{-2k} r^k, exterior R^{-2k} q^{2k} r^{-k}, normalized
        let matrix = lam * (q / r).powi(k) / r.powi(k);
        let z = C64::new(0.0, 0.0);
        outside.set_mode(
            mode,
            vec![
                Band::new(z, C64::new(lam / r.powi(k), 0.0)),
                Band::new(C64::new(matrix, 0.0), z),
                Band::new(z, C64::new(matrix, 0.0)),
            ],
        )?;
        let e = shifted_trace_expansion(mode.k(), config.rho, config.z0, order as u32, f64::INFINITY)?;
        tail += a.norm() * e.tail_bound;
        for (m, c) in e.coeffs.iter().enumerate() {
            // coefficients of Re(a z^{-k}) are conj(a I)/(πρ^{2m+1}) = conj(a)·c
            inside[m] += a.conj() * c;
        }
    }
    if tail > tolerance {
        return Err(Error::Truncation { order, tail, tolerance });
    }
    Ok(TwoCenterField { outside, inside, z0: config.z0, rho: config.rho, tail_bound: tail })
}

/// Flux error of `V` on `∂Σ` as `Re Σ μ_m (z − z0)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorExpansion {
    /// Contribution of the outer normal derivative, `−d_m`.
    pub mu_out: Vec<C64>,
    /// Contribution of the inner normal derivative, `−(m/ρ) c_m`.
    pub mu_in: Vec<C64>,
    pub mu: Vec<C64>,
    pub m_star: usize,
    /// `max_m |μ_m| R^m` over the computed range.
    pub decay_constant: f64,
    pub order: usize,
    /// Bound on `Σ_{m>M} |μ_m| ρ^m`.
    pub tail_bound: f64,
}

/// `m*`: smallest `m ≥ 1` with `(ρ/R)^{2m} ≤ η`.
pub fn m_star(rho: f64, r_shell: f64, eta: f64) -> usize {
    let ratio = (rho / r_shell).powi(2);
    let mut m = 1usize;
    let mut p = ratio;
    while p > eta && m < 100_000 {
        m += 1;
        p *= ratio;
    }
    m
}

/// `N_{m,k}(a) = ∫_{∂Σ} ∂_ν Re(a z^{−k}) (z − z0)^m ds = −π a k C(m, k)(−z0)^{m−k}`.
pub fn normal_interaction(m: u32, k: u32, a: C64, z0: C64) -> C64 {
    if m < k {
        return C64::new(0.0, 0.0);
    }
    -PI * a * k as f64 * binomial(m as i64, k as i64) * cpow(-z0, (m - k) as i64)
}

/// Coefficients of `F = ∇·(A∇V) − f` on `∂Σ`: with `A = +1` inside `Σ` and
/// `−1` outside, `F = −∂_ν V|_out − ∂_ν V|_in`.
pub fn boundary_error(config: &EccentricConfig, order: usize) -> Result<ErrorExpansion> {
    config.validate()?;
    let weights = config.weights();
    let rho = config.rho;
    let mut mu_out = vec![C64::new(0.0, 0.0); order + 1];
    let mut mu_in = vec![C64::new(0.0, 0.0); order + 1];
    for m in 1..=order {
        let denom = PI * rho.powi(2 * m as i32 + 1);
        let (mut d, mut c) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &(mode, _, a) in &weights {
            let k = mode.k();
            if k as usize > m {
                continue;
            }
            d += normal_interaction(m as u32, k, a, config.z0).conj();
            c += (a * interaction_coeff(m as u32, k, rho, config.z0)?).conj();
        }
        mu_out[m] = -d / denom;
        mu_in[m] = -(m as f64 / rho) * c / denom;
    }
    let mu: Vec<C64> = mu_out.iter().zip(&mu_in).map(|(a, b)| a + b).collect();
    let decay_constant = mu
        .iter()
        .enumerate()
        .map(|(m, v)| v.norm() * config.r_shell.powi(m as i32))
        .fold(0.0, f64::max);
    Ok(ErrorExpansion {
        mu_out,
        mu_in,
        mu,
        m_star: m_star(rho, config.r_shell, config.eta),
        decay_constant,
        order,
        tail_bound: mu_tail_majorant(config, order),
    })
}

/// Complex correction weights `B_k = β̂_k − i β̃_k`, `1 ≤ k ≤ min(m*, M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionCoefficients {
    /// `B_k` at index `k` (index 0 unused).
    pub b: Vec<C64>,
    pub beta_hat: Vec<f64>,
    pub beta_tilde: Vec<f64>,
    /// `max_k |β_k| R^k / (1+|z0|)^{k−1}`.
    pub bound_constant: f64,
}

pub fn corrections(error: &ErrorExpansion, config: &EccentricConfig) -> CorrectionCoefficients {
    let top = error.m_star.min(error.order);
    let mut b = vec![C64::new(0.0, 0.0); top + 1];
    for k in 1..=top {
        let mut acc = C64::new(0.0, 0.0);
        for m in k..=top {
            acc += error.mu[m] * binomial(m as i64 - 1, k as i64 - 1) * cpow(-config.z0, (m - k) as i64);
        }
        b[k] = acc * (config.rho / k as f64);
    }
    let beta_hat = b.iter().map(|c| c.re).collect();
    let beta_tilde = b.iter().map(|c| -c.im).collect();
    let e = 1.0 + config.z0.norm();
    let bound_constant = b
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.norm() * config.r_shell.powi(k as i32) / e.powi(k as i32 - 1))
        .fold(0.0, f64::max);
    CorrectionCoefficients { b, beta_hat, beta_tilde, bound_constant }
}

/// `½ Σ Re(B_k ·)` of the shell plasmons `Re(z^k)` / `R^{2k} Re(z^{−k})`.
fn correction_field(coeffs: &CorrectionCoefficients, r_shell: f64) -> Result<LayeredHarmonicField> {
    let mut f = LayeredHarmonicField::new(C64::new(0.0, 0.0), vec![r_shell])?;
    for (k, b) in coeffs.b.iter().enumerate().skip(1) {
        let scale = 0.5 * r_shell.powi(k as i32);
        // Re(B z^k) = Re B r^k cos kθ − Im B r^k sin kθ
        for (mode, amp) in [(Mode::cos(k as u32), b.re), (Mode::sin(k as u32), -b.im)] {
            if amp != 0.0 {
                let c = C64::new(scale * amp, 0.0);
                f.set_mode(mode, vec![Band::new(c, C64::new(0.0, 0.0)), Band::new(C64::new(0.0, 0.0), c)])?;
            }
        }
    }
    Ok(f)
}

/// Options for [`primal_certificate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EccentricOptions {
    /// Truncation tolerance for the expansions; also selects `M` when
    /// `order` is unset.
    pub tolerance: f64,
    pub order: Option<usize>,
    /// Replaces the cutoff `m*`.
    pub m_star: Option<usize>,
}

impl Default for EccentricOptions {
    fn default() -> Self {
        Self { tolerance: 1e-11, order: None, m_star: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EccentricTerms {
    /// `(η/2)∫|∇v|²`
    pub v: f64,
    /// `(1/2η)∫|∇w|²`
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EccentricPrimal {
    pub eta: f64,
    pub i: f64,
    pub terms: EccentricTerms,
    pub order: usize,
    pub error: ErrorExpansion,
    pub corrections: CorrectionCoefficients,
    pub v: TwoCenterField,
    pub correction: LayeredHarmonicField,
    pub w: LayeredHarmonicField,
    /// Max pointwise layer residual of `∇·(A∇v) − Δw − f` on `∂Σ`, `∂B_1`,
    /// `∂B_R` and `∂B_q`, relative to `max |F|`.
    pub constraint_residual: f64,
    pub quadrature_nodes: usize,
}

/// Primal certificate `v = V + ½ Σ Re(B_k V̂_k)`, `w` the single layer of
/// `−F^high` about `z0`.
pub fn primal_certificate(config: &EccentricConfig, options: EccentricOptions) -> Result<EccentricPrimal> {
    config.validate()?;
    let order = match options.order {
        Some(m) => m.max(config.source.max_k() as usize),
        None => auto_order(config, options.tolerance)?,
    };
    let v = build_v(config, order, options.tolerance.max(v_inside_tail(config, order)?))?;
    let mut error = boundary_error(config, order)?;
    if let Some(ms) = options.m_star {
        error.m_star = ms;
    }
    let corr = corrections(&error, config);
    let correction = correction_field(&corr, config.r_shell)?;

    // w: −Δw = −F^high
    let mut modes = Vec::new();
    for m in (error.m_star + 1)..=order {
        let mu = error.mu[m];
        let s = config.rho.powi(m as i32);
        modes.push((Mode::cos(m as u32), C64::new(-s * mu.re, 0.0)));
        modes.push((Mode::sin(m as u32), C64::new(s * mu.im, 0.0)));
    }
    let w = single_layer_solve(&LayerDensity::new(config.rho, config.z0, modes)?)?;

    let max_deg = order.max(error.m_star.min(order)).max(config.source.max_k() as usize);
    let n = pow2_at_least(4 * max_deg + 64);
    let pieces = Pieces { config, v: &v, correction: &correction, w: &w };
    let v_energy = pieces.v_dirichlet(n);
    let w_energy = w.gradient_energy(None)?;
    let terms = EccentricTerms { v: 0.5 * config.eta * v_energy, w: w_energy / (2.0 * config.eta) };
    let constraint_residual = pieces.constraint_residual(256);
    Ok(EccentricPrimal {
        eta: config.eta,
        i: terms.v + terms.w,
        terms,
        order,
        error,
        corrections: corr,
        v,
        correction,
        w,
        constraint_residual,
        quadrature_nodes: n,
    })
}

struct Pieces<'a> {
    config: &'a EccentricConfig,
    v: &'a TwoCenterField,
    correction: &'a LayeredHarmonicField,
    w: &'a LayeredHarmonicField,
}

impl Pieces<'_> {
    /// Origin-centered part of `v` outside `Σ` (value, ∂_r) at polar `(r, θ)`.
    fn outer_polar(&self, r: f64, theta: f64, side: Side) -> (f64, f64) {
        let (a, ar, _) = self.v.outside.eval_polar(r, theta, side);
        let (b, br, _) = self.correction.eval_polar(r, theta, side);
        ((a + b).re, (ar + br).re)
    }

    fn normal_derivative(field: &LayeredHarmonicField, z: C64, nu: C64) -> f64 {
        let (gx, gy) = field.gradient(z);
        (gx * nu.re + gy * nu.im).re
    }

    /// On `∂Σ` at angle φ: `(v, ∂_ν v|_out, ∂_ν v|_in)`.
    fn core_trace(&self, phi: f64) -> (f64, f64, f64) {
        let nu = C64::from_polar(1.0, phi);
        let z = self.config.z0 + self.config.rho * nu;
        let (vin, dvin) = self.v.inside_trace(phi);
        let corr = self.correction.evaluate(z).re;
        let dcorr = Self::normal_derivative(self.correction, z, nu);
        let dout = Self::normal_derivative(&self.v.outside, z, nu) + dcorr;
        (vin + corr, dout, dvin + dcorr)
    }

    /// `∫|∇v|² = −Σ_Γ ∮ v [∂_ν v] ds` by the trapezoid rule.
    fn v_dirichlet(&self, n: usize) -> f64 {
        let h = std::f64::consts::TAU / n as f64;
        let mut total = 0.0;
        for phi in circle_angles(n) {
            let (val, dout, din) = self.core_trace(phi);
            total -= val * (dout - din) * self.config.rho * h;
        }
        for r in [self.config.r_shell, self.config.q] {
            for th in circle_angles(n) {
                let (vi, di) = self.outer_polar(r, th, Side::Inside);
                let (_, d_o) = self.outer_polar(r, th, Side::Outside);
                total -= vi * (d_o - di) * r * h;
            }
        }
        total
    }

    /// Pointwise constraint residual, relative to `max |F|` on `∂B_q`.
    fn constraint_residual(&self, samples: usize) -> f64 {
        let cfg = self.config;
        let src = |th: f64| -> f64 { cfg.source.entries().iter().map(|(m, a)| a * m.angular(th)).sum() };
        let fmax = circle_angles(samples).map(|t| src(t).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let w_jump = crate::harmonics::flux_jump(self.w, &crate::harmonics::RadialProfile::uniform(C64::new(1.0, 0.0)), cfg.rho);
        let mut worst: f64 = 0.0;
        for phi in circle_angles(samples) {
            // ∂Σ: A = +1 inside, −1 outside
            let (_, dout, din) = self.core_trace(phi);
            let res = -dout - din - w_jump.evaluate(phi).re;
            worst = worst.max(res.abs());
        }
        for th in circle_angles(samples) {
            // ∂B_1: no interface (the shell continues inside up to ∂Σ)
            let z = C64::from_polar(1.0, th);
            let nu = C64::from_polar(1.0, th);
            let (gx1, gy1) = self.v.outside.gradient(z * (1.0 - 1e-13));
            let (gx2, gy2) = self.v.outside.gradient(z * (1.0 + 1e-13));
            let d = ((gx2 - gx1) * nu.re + (gy2 - gy1) * nu.im).norm();
            worst = worst.max(d);
            // ∂B_R: A from −1 to +1 (w is smooth away from ∂Σ)
            let (_, di) = self.outer_polar(cfg.r_shell, th, Side::Inside);
            let (_, d_o) = self.outer_polar(cfg.r_shell, th, Side::Outside);
            worst = worst.max((d_o + di).abs());
            // ∂B_q: [∂_r v] = F
            let (_, di) = self.outer_polar(cfg.q, th, Side::Inside);
            let (_, d_o) = self.outer_polar(cfg.q, th, Side::Outside);
            worst = worst.max((d_o - di - src(th)).abs());
        }
        worst / fmax
    }
}
