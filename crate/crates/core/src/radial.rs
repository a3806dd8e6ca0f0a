//! Exact per-mode solution of `∇·(a_η∇u) = f` for concentric circular
//! geometry, with `f = F·H¹⌊∂B_q` and `a_η = A + iη`.
//!
//! Each Fourier mode decouples into a small complex interface system
//! (continuity of `u` and of `a_η ∂_r u` at the core and shell circles,
//! continuity of `u` and a flux jump equal to the source amplitude at `r = q`).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::harmonics::{Band, LayeredHarmonicField, Mode, Parity, RadialProfile, Side};
use crate::numerics::condition_1norm;
use crate::{Error, Result, C64};

/// Condition estimate above which a mode solve is refused.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Fourier coefficients of the line source `F = Σ α_k cos kθ + Σ β_k sin kθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpectrum {
    pub alpha: Vec<(u32, f64)>,
    pub beta: Vec<(u32, f64)>,
    /// Set for algebraic families `α_k = k^{-p}` truncated at `k_max`.
    pub generator: Option<AlgebraicGenerator>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicGenerator {
    pub p: f64,
    pub k_max: u32,
}

impl SourceSpectrum {
    pub fn new(alpha: Vec<(u32, f64)>, beta: Vec<(u32, f64)>) -> Result<Self> {
        if alpha.iter().chain(&beta).any(|(k, _)| *k == 0) {
            return Err(Error::NonzeroMean("source spectra must not contain k = 0".into()));
        }
        if alpha.iter().chain(&beta).any(|(_, a)| !a.is_finite()) {
            return Err(Error::InvalidParameter("source amplitudes must be finite".into()));
        }
        Ok(Self { alpha, beta, generator: None })
    }

    pub fn empty() -> Self {
        Self { alpha: Vec::new(), beta: Vec::new(), generator: None }
    }

    /// Single cosine mode `α cos kθ`.
    pub fn single(k: u32, alpha: f64) -> Result<Self> {
        Self::new(vec![(k, alpha)], Vec::new())
    }

    /// `α_k = k^{-p}` for `1 ≤ k ≤ k_max`, no sine part.
    pub fn algebraic(p: f64, k_max: u32) -> Self {
        Self {
            alpha: (1..=k_max).map(|k| (k, (k as f64).powf(-p))).collect(),
            beta: Vec::new(),
            generator: Some(AlgebraicGenerator { p, k_max }),
        }
    }

    /// Nonzero `(mode, amplitude)` pairs, amplitudes of repeated modes summed.
    pub fn entries(&self) -> Vec<(Mode, f64)> {
        let mut map = std::collections::BTreeMap::new();
        for &(k, a) in &self.alpha {
            *map.entry(Mode::cos(k)).or_insert(0.0) += a;
        }
        for &(k, b) in &self.beta {
            *map.entry(Mode::sin(k)).or_insert(0.0) += b;
        }
        map.into_iter().filter(|(_, a)| *a != 0.0).collect()
    }

    pub fn amplitude(&self, mode: Mode) -> f64 {
        let list = match mode.parity() {
            Parity::Even => &self.alpha,
            Parity::Odd => &self.beta,
        };
        list.iter().filter(|(k, _)| *k == mode.k()).map(|(_, a)| a).sum()
    }

    /// `Σ (|α_k| + |β_k|)`.
    pub fn l1_norm(&self) -> f64 {
        self.alpha.iter().chain(&self.beta).map(|(_, a)| a.abs()).sum()
    }

    /// `max (|α_k|, |β_k|)`.
    pub fn sup_norm(&self) -> f64 {
        self.alpha.iter().chain(&self.beta).map(|(_, a)| a.abs()).fold(0.0, f64::max)
    }

    pub fn max_k(&self) -> u32 {
        self.alpha.iter().chain(&self.beta).map(|(k, _)| *k).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries().is_empty()
    }
}

/// Core inclusion of the concentric geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Core {
    /// Disc `B_{r0}(0)` with `A = +1`; the standard case has `r0 = 1`.
    Disk(f64),
    None,
}

impl Core {
    pub fn unit() -> Self {
        Core::Disk(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialConfig {
    pub r_shell: f64,
    pub q: f64,
    pub core: Core,
    pub eta: f64,
    pub source: SourceSpectrum,
}

impl RadialConfig {
    pub fn new(r_shell: f64, q: f64, core: Core, eta: f64, source: SourceSpectrum) -> Result<Self> {
        let cfg = Self { r_shell, q, core, eta, source };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let inner = match self.core {
            Core::Disk(r0) => {
                if !(r0 > 0.0) {
                    return Err(Error::InvalidGeometry(format!("core radius must be positive, got {r0}")));
                }
                r0
            }
            Core::None => 0.0,
        };
        if !(self.r_shell > inner && self.r_shell.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "shell radius R = {} must exceed the core radius {inner}",
                self.r_shell
            )));
        }
        if !(self.q > self.r_shell && self.q.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "source radius q = {} must exceed R = {}",
                self.q, self.r_shell
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("loss eta must be positive, got {}", self.eta)));
        }
        Ok(())
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        Self { eta, ..self.clone() }
    }

    /// Breakpoints `{r0, R, q}` or `{R, q}`.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.core {
            Core::Disk(r0) => vec![r0, self.r_shell, self.q],
            Core::None => vec![self.r_shell, self.q],
        }
    }

    /// `A` without loss.
    pub fn lossless_profile(&self) -> RadialProfile {
        let one = C64::new(1.0, 0.0);
        match self.core {
            Core::Disk(r0) => RadialProfile::new(vec![r0, self.r_shell], vec![one, -one, one]),
            Core::None => RadialProfile::new(vec![self.r_shell], vec![-one, one]),
        }
        .expect("validated geometry")
    }

    /// `a_η = A + iη`.
    pub fn profile(&self) -> RadialProfile {
        self.lossless_profile().with_loss(self.eta)
    }

    /// Per-band coefficient values, innermost first, on the breakpoints of
    /// [`RadialConfig::breakpoints`].
    fn band_coefficients(&self) -> Vec<C64> {
        let e = C64::new(0.0, self.eta);
        let (p, m) = (C64::new(1.0, 0.0) + e, C64::new(-1.0, 0.0) + e);
        match self.core {
            Core::Disk(_) => vec![p, m, p, p],
            Core::None => vec![m, p, p],
        }
    }
}

/// Coefficient field of one mode plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub mode: Mode,
    pub field: LayeredHarmonicField,
    pub condition: f64,
    /// Largest relative residual among the interface conditions.
    pub interface_residual: f64,
}

/// Solves the interface system of one mode for a source amplitude `s`.
pub fn solve_mode_amplitude(config: &RadialConfig, mode: Mode, s: f64) -> Result<ModeSolution> {
    config.validate()?;
    if mode.k() == 0 {
        return Err(Error::InvalidMode("radial solves need k >= 1".into()));
    }
    let bps = config.breakpoints();
    let nb = bps.len() + 1;
    let a = config.band_coefficients();
    let k = mode.k() as i32;
    let kf = mode.k() as f64;
    let zero = C64::new(0.0, 0.0);
    let mut field = LayeredHarmonicField::new(C64::new(0.0, 0.0), bps.clone())?;
    if s == 0.0 {
        return Ok(ModeSolution { mode, field, condition: 1.0, interface_residual: 0.0 });
    }

    // Unknown layout: band 0 plus, then (plus, minus) for interior bands,
    // then the outermost minus.
    let n = 2 * nb - 2;
    let plus_col = |j: usize| if j == 0 { Some(0) } else if j < nb - 1 { Some(2 * j - 1) } else { None };
    let minus_col = |j: usize| if j == 0 { None } else if j < nb - 1 { Some(2 * j) } else { Some(n - 1) };
    let plus_ref = |j: usize| bps[j.min(bps.len() - 1)];
    let minus_ref = |j: usize| bps[j.saturating_sub(1)];
    // value and r·∂_r/k of each basis function of band j at radius r
    let basis = |j: usize, r: f64| -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        if let Some(c) = plus_col(j) {
            let v = (r / plus_ref(j)).powi(k);
            out.push((c, v, v));
        }
        if let Some(c) = minus_col(j) {
            let v = (minus_ref(j) / r).powi(k);
            out.push((c, v, -v));
        }
        out
    };

    let mut mat = DMatrix::<C64>::zeros(n, n);
    let mut rhs = DVector::<C64>::zeros(n);
    for (i, &b) in bps.iter().enumerate() {
        let (row_v, row_f) = (2 * i, 2 * i + 1);
        for (c, v, _) in basis(i + 1, b) {
            mat[(row_v, c)] += v;
        }
        for (c, v, _) in basis(i, b) {
            mat[(row_v, c)] -= v;
        }
        for (c, _, d) in basis(i + 1, b) {
            mat[(row_f, c)] += a[i + 1] * d;
        }
        for (c, _, d) in basis(i, b) {
            mat[(row_f, c)] -= a[i] * d;
        }
        if i == bps.len() - 1 {
            // flux equation is scaled by r/k
            rhs[row_f] = C64::new(s * b / kf, 0.0);
        }
    }

    let condition = condition_1norm(&mat);
    if !(condition < CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition, limit: CONDITION_LIMIT });
    }
    let sol = mat.clone().lu().solve(&rhs).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
        limit: CONDITION_LIMIT,
    })?;

    let bands: Vec<Band> = (0..nb)
        .map(|j| {
            let p = plus_col(j).map_or(zero, |c| sol[c]);
            let m = minus_col(j).map_or(zero, |c| sol[c]);
            Band::new(p, m)
        })
        .collect();
    field.set_mode(mode, bands)?;

    let residual = interface_residual(&field, &config.profile(), mode, s, config.q);
    Ok(ModeSolution { mode, field, condition, interface_residual: residual })
}

/// Solves one mode with the amplitude taken from the configured source.
pub fn solve_mode(config: &RadialConfig, mode: Mode) -> Result<ModeSolution> {
    solve_mode_amplitude(config, mode, config.source.amplitude(mode))
}

/// Largest relative mismatch in the continuity/flux conditions.
fn interface_residual(field: &LayeredHarmonicField, profile: &RadialProfile, mode: Mode, s: f64, q: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for &b in field.breakpoints() {
        let (vi, di) = field.radial_profile(mode, b, Side::Inside);
        let (vo, d_o) = field.radial_profile(mode, b, Side::Outside);
        let scale = vi.norm().max(vo.norm()).max(f64::MIN_POSITIVE);
        worst = worst.max((vi - vo).norm() / scale);
        let fi = profile.value(b, Side::Inside) * di;
        let fo = profile.value(b, Side::Outside) * d_o;
        let target = if b == q { s } else { 0.0 };
        let fscale = fi.norm().max(fo.norm()).max(s.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((fo - fi - target).norm() / fscale);
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub eta: f64,
    /// `(η/2)∫|∇u|²` summed over the configured modes.
    pub e: f64,
    pub per_mode: Vec<(Mode, f64)>,
    /// `|E − E_source| / E` with `E_source = −½ Im ∫_{∂B_q} F ū ds`.
    pub identity_residual: f64,
    /// Geometric extrapolation of the energy carried by modes beyond a
    /// truncated generator (zero for finite spectra).
    pub tail_estimate: f64,
    pub max_condition: f64,
    pub max_interface_residual: f64,
}

/// Dissipation `−½ Im ∫_{∂B_q} F ū ds` of a single-mode solution.
pub fn source_dissipation(solution: &ModeSolution, s: f64, q: f64) -> f64 {
    let (u_q, _) = solution.field.radial_profile(solution.mode, q, Side::Inside);
    // ∫ cos² = ∫ sin² = π over the circle of radius q
    -0.5 * (C64::new(s * std::f64::consts::PI * q, 0.0) * u_q.conj()).im
}

/// Exact dissipation `E_η` and diagnostics.
pub fn energy(config: &RadialConfig) -> Result<EnergyReport> {
    config.validate()?;
    let mut per_mode = Vec::new();
    let (mut total, mut from_source) = (0.0, 0.0);
    let (mut max_cond, mut max_res): (f64, f64) = (1.0, 0.0);
    for (mode, s) in config.source.entries() {
        let sol = solve_mode_amplitude(config, mode, s)?;
        let e = 0.5 * config.eta * sol.field.gradient_energy(None)?;
        from_source += source_dissipation(&sol, s, config.q);
        max_cond = max_cond.max(sol.condition);
        max_res = max_res.max(sol.interface_residual);
        total += e;
        per_mode.push((mode, e));
    }
    let identity_residual = if total > 0.0 { (total - from_source).abs() / total } else { from_source.abs() };
    let tail_estimate = match config.source.generator {
        Some(_) => geometric_tail(&per_mode),
        None => 0.0,
    };
    Ok(EnergyReport {
        eta: config.eta,
        e: total,
        per_mode,
        identity_residual,
        tail_estimate,
        max_condition: max_cond,
        max_interface_residual: max_res,
    })
}

/// `E_K r/(1−r)` with `r = E_K/E_{K−1}` from the last two cosine modes.
fn geometric_tail(per_mode: &[(Mode, f64)]) -> f64 {
    let cos: Vec<f64> = per_mode.iter().filter(|(m, _)| m.parity() == Parity::Even).map(|(_, e)| *e).collect();
    match cos.as_slice() {
        [.., prev, last] if *prev > 0.0 => {
            let r = last / prev;
            if r < 1.0 {
                last * r / (1.0 - r)
            } else {
                f64::INFINITY
            }
        }
        _ => 0.0,
    }
}

/// `(η, E_η)` for each η, in input order.
pub fn eta_sweep(template: &RadialConfig, etas: &[f64]) -> Result<Vec<(f64, f64)>> {
    etas.iter().map(|&eta| Ok((eta, energy(&template.with_eta(eta))?.e))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Resonant,
    NonResonant,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Resonant => "resonant",
            Verdict::NonResonant => "non-resonant",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Least-squares slope of `log E` against `log η` over the last decade.
    pub slope: f64,
    /// `max E / min E` over the last two decades.
    pub spread: f64,
}

pub const RESONANT_SLOPE: f64 = -0.5;
pub const BOUNDED_SLOPE: f64 = -0.1;
pub const BOUNDED_SPREAD: f64 = 10.0;

/// Classifies an η-series: resonant if the last-decade slope is `≤ −0.5`,
/// non-resonant if it is `≥ −0.1` and `max/min E ≤ 10` over the last two
/// decades, inconclusive otherwise.
pub fn classify_resonance(series: &[(f64, f64)]) -> Classification {
    let inconclusive = Classification { verdict: Verdict::Inconclusive, slope: f64::NAN, spread: f64::NAN };
    if series.len() < 2 || series.iter().any(|(eta, e)| !(*eta > 0.0) || !(*e >= 0.0) || !e.is_finite()) {
        return inconclusive;
    }
    let eta_min = series.iter().map(|(eta, _)| *eta).fold(f64::INFINITY, f64::min);
    let window = |decades: f64| -> Vec<(f64, f64)> {
        series.iter().copied().filter(|(eta, _)| *eta <= eta_min * 10f64.powf(decades) * (1.0 + 1e-12)).collect()
    };
    let last = window(1.0);
    let two = window(2.0);
    if last.len() < 2 {
        return inconclusive;
    }
    if series.iter().all(|(_, e)| *e == 0.0) {
        return Classification { verdict: Verdict::NonResonant, slope: 0.0, spread: 1.0 };
    }
    if last.iter().any(|(_, e)| *e == 0.0) {
        return inconclusive;
    }
    let pts: Vec<(f64, f64)> = last.iter().map(|(eta, e)| (eta.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let max = two.iter().map(|p| p.1).fold(0.0, f64::max);
    let min = two.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let spread = if min > 0.0 { max / min } else { f64::INFINITY };
    let verdict = if slope <= RESONANT_SLOPE {
        Verdict::Resonant
    } else if slope >= BOUNDED_SLOPE && spread <= BOUNDED_SPREAD {
        Verdict::NonResonant
    } else {
        Verdict::Inconclusive
    };
    Classification { verdict, slope, spread }
}

/// Critical source radius `r0 (R/r0)^{3/2}` separating resonant from
/// non-resonant source placements.
pub fn critical_radius(r_shell: f64, r0: f64) -> Result<f64> {
    if !(r0 > 0.0) || !(r_shell >= r0) {
        return Err(Error::InvalidGeometry(format!("need 0 < r0 <= R, got r0 = {r0}, R = {r_shell}")));
    }
    Ok(r0 * (r_shell / r0).powf(1.5))
}

/// Logarithmic grid `10^{-from} … 10^{-to}` with one point per decade.
pub fn decade_grid(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|d| 10f64.powi(-d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(r: f64, q: f64, core: Core, eta: f64, src: SourceSpectrum) -> RadialConfig {
        RadialConfig::new(r, q, core, eta, src).unwrap()
    }

    #[test]
    fn zero_source_gives_zero_solution() {
        let c = cfg(2.0, 3.0, Core::unit(), 0.1, SourceSpectrum::empty());
        let sol = solve_mode(&c, Mode::cos(3)).unwrap();
        assert_eq!(sol.field.gradient_energy(None).unwrap(), 0.0);
        assert_eq!(energy(&c).unwrap().e, 0.0);
    }

    #[test]
    fn interface_conditions_hold() {
        for core in [Core::unit(), Core::None] {
            for k in [1, 2, 7, 30] {
                let c = cfg(2.0, 2.5, core, 1e-4, SourceSpectrum::single(k, 1.0).unwrap());
                let sol = solve_mode(&c, Mode::cos(k)).unwrap();
                assert!(sol.interface_residual <= 1e-12, "k={k} {:?}: {}", core, sol.interface_residual);
            }
        }
    }

    #[test]
    fn dissipation_identity() {
        for core in [Core::unit(), Core::None] {
            for (r, q) in [(1.5, 2.0), (2.0, 3.0), (2.0, 2.5)] {
                for eta in [1e-1, 1e-3, 1e-6] {
                    let c = cfg(r, q, core, eta, SourceSpectrum::algebraic(2.0, 60));
                    let rep = energy(&c).unwrap();
                    assert!(rep.identity_residual <= 1e-10, "{r} {q} {eta}: {}", rep.identity_residual);
                }
            }
        }
    }

    #[test]
    fn sine_and_cosine_modes_share_energy() {
        let a = cfg(2.0, 3.0, Core::unit(), 1e-2, SourceSpectrum::new(vec![(3, 0.7)], vec![]).unwrap());
        let b = cfg(2.0, 3.0, Core::unit(), 1e-2, SourceSpectrum::new(vec![], vec![(3, 0.7)]).unwrap());
        assert!((energy(&a).unwrap().e - energy(&b).unwrap().e).abs() < 1e-14);
    }

    #[test]
    fn coreless_single_mode_matches_hand_solution() {
        // Uniform medium check: with a_η ≡ 1 + iη everywhere the field would be
        // the single layer; here verify instead against a direct 4x4 derivation
        // by plugging the returned coefficients into the raw conditions.
        let c = cfg(1.5, 2.0, Core::None, 1e-3, SourceSpectrum::single(1, 1.0).unwrap());
        let sol = solve_mode(&c, Mode::cos(1)).unwrap();
        let raw = sol.field.raw_coefficients(Mode::cos(1));
        let (e, k) = (1e-3, 1.0);
        let am = C64::new(-1.0, e);
        let ap = C64::new(1.0, e);
        // continuity at R
        let r = 1.5;
        let lhs = raw[0].0 * r;
        let rhs = raw[1].0 * r + raw[1].1 / r;
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
        let fl = am * k * raw[0].0;
        let fr = ap * k * (raw[1].0 - raw[1].1 / (r * r));
        assert!((fl - fr).norm() < 1e-10 * fl.norm());
        assert!(energy(&c).unwrap().e >= 562.5 * PI);
    }

    #[test]
    fn energy_is_sum_of_modes() {
        let c = cfg(2.0, 3.0, Core::unit(), 1e-3, SourceSpectrum::algebraic(2.0, 20));
        let total = energy(&c).unwrap().e;
        let parts: f64 = (1..=20)
            .map(|k| energy(&cfg(2.0, 3.0, Core::unit(), 1e-3, SourceSpectrum::single(k, (k as f64).powi(-2)).unwrap())).unwrap().e)
            .sum();
        assert!((total - parts).abs() <= 1e-12 * total);
    }

    #[test]
    fn critical_radius_examples() {
        assert!((critical_radius(2.0, 1.0).unwrap() - 2.828_427_124_746_19).abs() < 1e-12);
        assert_eq!(critical_radius(1.3, 1.3).unwrap(), 1.3);
        assert!((critical_radius(4.0, 2.0).unwrap() - 5.656_854_249_492_38).abs() < 1e-12);
    }

    #[test]
    fn classify_constant_and_growing() {
        let flat: Vec<_> = decade_grid(1, 6).into_iter().map(|e| (e, 3.0)).collect();
        assert_eq!(classify_resonance(&flat).verdict, Verdict::NonResonant);
        let grow: Vec<_> = decade_grid(1, 6).into_iter().map(|e| (e, 1.0 / e)).collect();
        let c = classify_resonance(&grow);
        assert_eq!(c.verdict, Verdict::Resonant);
        assert!((c.slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn coreless_energy_blows_up() {
        let c = cfg(1.5, 2.0, Core::None, 1.0, SourceSpectrum::single(1, 1.0).unwrap());
        let s = eta_sweep(&c, &decade_grid(2, 8)).unwrap();
        assert!(s.windows(2).all(|w| w[1].1 > w[0].1));
        assert_eq!(classify_resonance(&s).verdict, Verdict::Resonant);
    }

    #[test]
    fn scaling_preserves_classification() {
        for (q, lam) in [(3.0, 2.5), (2.5, 0.5)] {
            let base = cfg(2.0, q, Core::unit(), 1.0, SourceSpectrum::algebraic(2.0, 60));
            let scaled = cfg(2.0 * lam, q * lam, Core::Disk(lam), 1.0, SourceSpectrum::algebraic(2.0, 60));
            let grid = decade_grid(1, 6);
            let a = classify_resonance(&eta_sweep(&base, &grid).unwrap());
            let b = classify_resonance(&eta_sweep(&scaled, &grid).unwrap());
            assert_eq!(a.verdict, b.verdict);
            assert!((a.slope - b.slope).abs() < 1e-8);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(RadialConfig::new(2.0, 1.5, Core::unit(), 0.1, SourceSpectrum::empty()).is_err());
        assert!(RadialConfig::new(2.0, 3.0, Core::unit(), 0.0, SourceSpectrum::empty()).is_err());
        assert!(RadialConfig::new(0.8, 3.0, Core::unit(), 0.1, SourceSpectrum::empty()).is_err());
        assert!(SourceSpectrum::new(vec![(0, 1.0)], vec![]).is_err());
    }
}
