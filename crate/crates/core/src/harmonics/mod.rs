//! Piecewise-harmonic fields built from `r^{±k}·{cos, sin}(kθ)` bands
//! around circular breakpoints, single-layer potentials, and the
//! shifted-center interaction coefficients used for eccentric cores.
//!
//! Band coefficients are stored normalized to the radii bounding each band:
//! in band `j` (between breakpoints `b_{j-1}` and `b_j`) a mode contributes
//! `plus·(r/b_j)^k + minus·(b_{j-1}/r)^k`. The raw coefficients `c±` of
//! `r^{±k}` are available through [`LayeredHarmonicField::raw_coefficients`].
//! Keeping the normalized form avoids overflow for large wave numbers.

mod interaction;

pub use interaction::{
    interaction_coeff, interaction_quadrature, q_weighted_bound, q_weighted_sum,
    reexpand_about_origin, shifted_trace_expansion, InteractionTable, ShiftedExpansion,
    TruncationWarning,
};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Angular parity of a Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// `cos(kθ)`
    Even,
    /// `sin(kθ)`
    Odd,
}

/// A Fourier mode `(k, parity)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    k: u32,
    parity: Parity,
}

impl Mode {
    pub fn new(k: u32, parity: Parity) -> Result<Self> {
        if k == 0 && parity == Parity::Odd {
            return Err(Error::InvalidMode("k = 0 has no odd (sine) component".into()));
        }
        Ok(Self { k, parity })
    }

    pub fn cos(k: u32) -> Self {
        Self { k, parity: Parity::Even }
    }

    /// Panics for `k = 0`.
    pub fn sin(k: u32) -> Self {
        assert!(k > 0, "sin(0θ) vanishes identically");
        Self { k, parity: Parity::Odd }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// `cos(kθ)` or `sin(kθ)`.
    pub fn angular(&self, theta: f64) -> f64 {
        let kt = self.k as f64 * theta;
        match self.parity {
            Parity::Even => kt.cos(),
            Parity::Odd => kt.sin(),
        }
    }

    /// `∂_θ` of [`Mode::angular`].
    pub fn angular_derivative(&self, theta: f64) -> f64 {
        let k = self.k as f64;
        match self.parity {
            Parity::Even => -k * (k * theta).sin(),
            Parity::Odd => k * (k * theta).cos(),
        }
    }
}

/// Normalized coefficients of one mode in one band.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Band {
    pub plus: C64,
    pub minus: C64,
}

impl Band {
    pub fn new(plus: C64, minus: C64) -> Self {
        Self { plus, minus }
    }

    fn is_zero(&self) -> bool {
        self.plus == C64::new(0.0, 0.0) && self.minus == C64::new(0.0, 0.0)
    }
}

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Inside,
    Outside,
}

/// Radial region `inner <= r <= outer`; `outer` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0) || !(outer >= inner) {
            return Err(Error::InvalidGeometry(format!(
                "annulus needs 0 <= inner <= outer, got [{inner}, {outer}]"
            )));
        }
        Ok(Self { inner, outer })
    }

    pub fn plane() -> Self {
        Self { inner: 0.0, outer: f64::INFINITY }
    }
}

/// Piecewise-harmonic field around a center with circular breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredHarmonicField {
    center: C64,
    breakpoints: Vec<f64>,
    modes: BTreeMap<Mode, Vec<Band>>,
    excised_core: bool,
}

fn validate_breakpoints(breakpoints: &[f64]) -> Result<()> {
    if breakpoints.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidField(format!(
            "breakpoints must be positive and finite: {breakpoints:?}"
        )));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidField(format!(
            "breakpoints must be strictly increasing: {breakpoints:?}"
        )));
    }
    Ok(())
}

impl LayeredHarmonicField {
    /// Empty field with the given breakpoints.
    pub fn new(center: C64, breakpoints: Vec<f64>) -> Result<Self> {
        validate_breakpoints(&breakpoints)?;
        Ok(Self { center, breakpoints, modes: BTreeMap::new(), excised_core: false })
    }

    /// Field that is only meaningful outside a core containing the center,
    /// so the innermost band may carry `r^{-k}` terms. Its energy can only be
    /// taken over regions that avoid the center.
    pub fn with_excised_core(center: C64, breakpoints: Vec<f64>) -> Result<Self> {
        let mut f = Self::new(center, breakpoints)?;
        f.excised_core = true;
        Ok(f)
    }

    pub fn zero(center: C64) -> Self {
        Self { center, breakpoints: Vec::new(), modes: BTreeMap::new(), excised_core: false }
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_excised(&self) -> bool {
        self.excised_core
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Mode, &[Band])> {
        self.modes.iter().map(|(m, b)| (m, b.as_slice()))
    }

    pub fn bands(&self, mode: Mode) -> Option<&[Band]> {
        self.modes.get(&mode).map(Vec::as_slice)
    }

    pub fn num_bands(&self) -> usize {
        self.breakpoints.len() + 1
    }

    fn plus_ref(&self, band: usize) -> f64 {
        let j = self.breakpoints.len();
        if band < j {
            self.breakpoints[band]
        } else if j > 0 {
            self.breakpoints[j - 1]
        } else {
            1.0
        }
    }

    fn minus_ref(&self, band: usize) -> f64 {
        if band > 0 {
            self.breakpoints[band - 1]
        } else if !self.breakpoints.is_empty() {
            self.breakpoints[0]
        } else {
            1.0
        }
    }

    /// Sets the normalized bands of a mode, checking regularity and decay.
    pub fn set_mode(&mut self, mode: Mode, bands: Vec<Band>) -> Result<()> {
        if bands.len() != self.num_bands() {
            return Err(Error::InvalidField(format!(
                "mode {mode:?}: expected {} bands, got {}",
                self.num_bands(),
                bands.len()
            )));
        }
        let zero = C64::new(0.0, 0.0);
        let last = bands.len() - 1;
        if mode.k == 0 {
            if bands.iter().any(|b| b.minus != zero) {
                return Err(Error::InvalidField("k = 0 bands carry constants only".into()));
            }
        } else {
            if !self.excised_core && bands[0].minus != zero {
                return Err(Error::InvalidField(format!(
                    "mode {mode:?}: innermost band must be regular at the center"
                )));
            }
            if bands[last].plus != zero {
                return Err(Error::InvalidField(format!(
                    "mode {mode:?}: outermost band must decay"
                )));
            }
        }
        if bands.iter().all(Band::is_zero) {
            self.modes.remove(&mode);
        } else {
            self.modes.insert(mode, bands);
        }
        Ok(())
    }

    /// Sets a mode from raw coefficients `(c⁺, c⁻)` of `r^k` and `r^{-k}`.
    pub fn set_mode_raw(&mut self, mode: Mode, raw: &[(C64, C64)]) -> Result<()> {
        let k = mode.k as i32;
        let bands = raw
            .iter()
            .enumerate()
            .map(|(j, &(cp, cm))| {
                let plus = if cp == C64::new(0.0, 0.0) { cp } else { cp * self.plus_ref(j).powi(k) };
                let minus = if cm == C64::new(0.0, 0.0) { cm } else { cm * self.minus_ref(j).powi(-k) };
                Band::new(plus, minus)
            })
            .collect();
        self.set_mode(mode, bands)
    }

    /// Raw coefficients `(c⁺, c⁻)` of `r^k` and `r^{-k}` per band.
    pub fn raw_coefficients(&self, mode: Mode) -> Vec<(C64, C64)> {
        let k = mode.k as i32;
        match self.modes.get(&mode) {
            None => vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); self.num_bands()],
            Some(bands) => bands
                .iter()
                .enumerate()
                .map(|(j, b)| (b.plus * self.plus_ref(j).powi(-k), b.minus * self.minus_ref(j).powi(k)))
                .collect(),
        }
    }

    /// Band index holding radius `r`; at a breakpoint `side` decides.
    pub fn band_index(&self, r: f64, side: Side) -> usize {
        self.breakpoints
            .iter()
            .filter(|&&b| b < r || (b == r && side == Side::Outside))
            .count()
    }

    /// Radial profile `(u_k(r), ∂_r u_k(r))` of one mode in a given band.
    fn radial_in_band(&self, mode: Mode, band: usize, r: f64) -> (C64, C64) {
        let Some(bands) = self.modes.get(&mode) else {
            return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        };
        let b = bands[band];
        if mode.k == 0 {
            return (b.plus, C64::new(0.0, 0.0));
        }
        let k = mode.k as i32;
        let kf = mode.k as f64;
        let mut value = C64::new(0.0, 0.0);
        let mut deriv = C64::new(0.0, 0.0);
        if b.plus != C64::new(0.0, 0.0) {
            let p = (r / self.plus_ref(band)).powi(k);
            value += b.plus * p;
            deriv += b.plus * p * (kf / r);
        }
        if b.minus != C64::new(0.0, 0.0) {
            let m = (self.minus_ref(band) / r).powi(k);
            value += b.minus * m;
            deriv -= b.minus * m * (kf / r);
        }
        (value, deriv)
    }

    /// Per-mode radial value and derivative at `r` (one-sided at breakpoints).
    pub fn radial_profile(&self, mode: Mode, r: f64, side: Side) -> (C64, C64) {
        self.radial_in_band(mode, self.band_index(r, side), r)
    }

    /// Per-mode amplitudes of the trace `u(r, ·)`.
    pub fn trace(&self, r: f64, side: Side) -> Vec<(Mode, C64)> {
        self.modes.keys().map(|&m| (m, self.radial_profile(m, r, side).0)).collect()
    }

    /// Per-mode amplitudes of `∂_r u(r, ·)`.
    pub fn radial_flux(&self, r: f64, side: Side) -> Vec<(Mode, C64)> {
        self.modes.keys().map(|&m| (m, self.radial_profile(m, r, side).1)).collect()
    }

    /// Value and polar derivatives `(u, ∂_r u, ∂_θ u)` at a point given in
    /// polar coordinates about the center.
    pub fn eval_polar(&self, r: f64, theta: f64, side: Side) -> (C64, C64, C64) {
        let band = self.band_index(r, side);
        let mut out = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &mode in self.modes.keys() {
            let (v, d) = self.radial_in_band(mode, band, r);
            out.0 += v * mode.angular(theta);
            out.1 += d * mode.angular(theta);
            out.2 += v * mode.angular_derivative(theta);
        }
        out
    }

    /// Value at a point of the plane.
    pub fn evaluate(&self, z: C64) -> C64 {
        let w = z - self.center;
        self.eval_polar(w.norm(), w.arg(), Side::Inside).0
    }

    /// Cartesian gradient `(∂_x u, ∂_y u)` at a point off the breakpoints.
    pub fn gradient(&self, z: C64) -> (C64, C64) {
        let w = z - self.center;
        let (r, theta) = (w.norm(), w.arg());
        let (_, ur, ut) = self.eval_polar(r, theta, Side::Inside);
        let (c, s) = (theta.cos(), theta.sin());
        (ur * c - ut * s / r, ur * s + ut * c / r)
    }

    /// Copy of the field re-expressed on a refined set of breakpoints
    /// (must contain the current ones).
    pub fn refined(&self, breakpoints: &[f64]) -> Result<Self> {
        validate_breakpoints(breakpoints)?;
        for b in &self.breakpoints {
            if !breakpoints.contains(b) {
                return Err(Error::InvalidField(format!(
                    "refinement {breakpoints:?} drops breakpoint {b}"
                )));
            }
        }
        let mut out = Self {
            center: self.center,
            breakpoints: breakpoints.to_vec(),
            modes: BTreeMap::new(),
            excised_core: self.excised_core,
        };
        for (&mode, bands) in &self.modes {
            let k = mode.k as i32;
            let new_bands = (0..out.num_bands())
                .map(|j| {
                    // representative radius strictly inside the new band
                    let lo = if j == 0 { 0.0 } else { out.breakpoints[j - 1] };
                    let hi = out.breakpoints.get(j).copied().unwrap_or(f64::INFINITY);
                    let probe = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo.max(1.0) };
                    let old = self.band_index(probe, Side::Inside);
                    let b = bands[old];
                    if mode.k == 0 {
                        return b;
                    }
                    let plus = b.plus * (out.plus_ref(j) / self.plus_ref(old)).powi(k);
                    let minus = b.minus * (self.minus_ref(old) / out.minus_ref(j)).powi(k);
                    Band::new(plus, minus)
                })
                .collect();
            out.modes.insert(mode, new_bands);
        }
        Ok(out)
    }

    fn merged_breakpoints(&self, other: &Self) -> Vec<f64> {
        let mut all: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.dedup();
        all
    }

    /// Sum of two fields sharing a center.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.center - other.center).norm() > 0.0 {
            return Err(Error::InvalidField(format!(
                "cannot add fields with centers {} and {}",
                self.center, other.center
            )));
        }
        let bps = self.merged_breakpoints(other);
        let a = self.refined(&bps)?;
        let b = other.refined(&bps)?;
        let mut out = a.clone();
        out.excised_core = a.excised_core || b.excised_core;
        for (&mode, bands) in &b.modes {
            let merged: Vec<Band> = match a.modes.get(&mode) {
                Some(existing) => existing
                    .iter()
                    .zip(bands)
                    .map(|(x, y)| Band::new(x.plus + y.plus, x.minus + y.minus))
                    .collect(),
                None => bands.clone(),
            };
            out.set_mode(mode, merged)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for bands in out.modes.values_mut() {
            for b in bands.iter_mut() {
                b.plus *= factor;
                b.minus *= factor;
            }
        }
        out.modes.retain(|_, bands| !bands.iter().all(Band::is_zero));
        out
    }

    /// Restriction to a subset of modes.
    pub fn filter_modes(&self, keep: impl Fn(Mode) -> bool) -> Self {
        let mut out = self.clone();
        out.modes.retain(|m, _| keep(*m));
        out
    }

    /// Dirichlet energy `∫|∇u|²` over a radial region (whole plane if `None`).
    ///
    /// Uses the closed forms `πk(r₂^{2k} − r₁^{2k})|c⁺|²` and
    /// `πk(r₁^{−2k} − r₂^{−2k})|c⁻|²`; same-mode cross terms and distinct
    /// modes are orthogonal.
    pub fn gradient_energy(&self, region: Option<Annulus>) -> Result<f64> {
        let region = region.unwrap_or_else(Annulus::plane);
        let mut total = 0.0;
        for (&mode, bands) in &self.modes {
            if mode.k == 0 {
                continue;
            }
            let k = mode.k as i32;
            for (j, b) in bands.iter().enumerate() {
                let lo = if j == 0 { 0.0 } else { self.breakpoints[j - 1] };
                let hi = self.breakpoints.get(j).copied().unwrap_or(f64::INFINITY);
                let a = lo.max(region.inner);
                let c = hi.min(region.outer);
                if !(c > a) {
                    continue;
                }
                let pk = PI * mode.k as f64;
                if b.plus.norm_sqr() > 0.0 {
                    if c.is_infinite() {
                        return Err(Error::InfiniteEnergy(format!(
                            "mode {mode:?} grows like r^k in an unbounded region"
                        )));
                    }
                    let pr = self.plus_ref(j);
                    total += pk * b.plus.norm_sqr() * ((c / pr).powi(2 * k) - (a / pr).powi(2 * k));
                }
                if b.minus.norm_sqr() > 0.0 {
                    if a == 0.0 {
                        return Err(Error::InfiniteEnergy(format!(
                            "mode {mode:?} is singular like r^-k at the center"
                        )));
                    }
                    let mr = self.minus_ref(j);
                    let outer = if c.is_infinite() { 0.0 } else { (mr / c).powi(2 * k) };
                    total += pk * b.minus.norm_sqr() * ((mr / a).powi(2 * k) - outer);
                }
            }
        }
        Ok(total)
    }
}

/// Piecewise-constant radial coefficient `a(r)` (e.g. `A + iη`).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    breakpoints: Vec<f64>,
    values: Vec<C64>,
}

impl RadialProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        validate_breakpoints(&breakpoints)?;
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "profile needs {} values, got {}",
                breakpoints.len() + 1,
                values.len()
            )));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn uniform(value: C64) -> Self {
        Self { breakpoints: Vec::new(), values: vec![value] }
    }

    /// `-1` inside `R`, `+1` outside: the coreless sign-changing shell.
    pub fn coreless(r_shell: f64) -> Result<Self> {
        Self::new(vec![r_shell], vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)])
    }

    /// Core–shell–matrix `A`: `+1` for `r < 1`, `-1` for `1 < r < R`, `+1` beyond.
    pub fn core_shell(r_shell: f64) -> Result<Self> {
        Self::new(
            vec![1.0, r_shell],
            vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0)],
        )
    }

    /// Profile with `iη` added everywhere.
    pub fn with_loss(&self, eta: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v + C64::new(0.0, eta)).collect(),
        }
    }

    pub fn value(&self, r: f64, side: Side) -> C64 {
        let idx = self
            .breakpoints
            .iter()
            .filter(|&&b| b < r || (b == r && side == Side::Outside))
            .count();
        self.values[idx]
    }
}

/// A layer density `g·H¹⌊∂B_radius(center)` given by Fourier amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDensity {
    pub radius: f64,
    pub center: C64,
    pub modes: Vec<(Mode, C64)>,
    pub allow_mean: bool,
}

impl LayerDensity {
    /// Mean-zero density; rejects `k = 0` components.
    pub fn new(radius: f64, center: C64, modes: Vec<(Mode, C64)>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidGeometry(format!("layer radius must be positive, got {radius}")));
        }
        if let Some((m, _)) = modes.iter().find(|(m, g)| m.k == 0 && g.norm() > 0.0) {
            return Err(Error::NonzeroMean(format!("{m:?}")));
        }
        Ok(Self { radius, center, modes, allow_mean: false })
    }

    /// Density that may carry a mean (k = 0) component.
    pub fn with_mean(radius: f64, center: C64, modes: Vec<(Mode, C64)>) -> Self {
        Self { radius, center, modes, allow_mean: true }
    }

    pub fn amplitude(&self, mode: Mode) -> C64 {
        self.modes.iter().filter(|(m, _)| *m == mode).map(|(_, g)| *g).sum()
    }

    /// Largest amplitude magnitude.
    pub fn max_amplitude(&self) -> f64 {
        self.modes.iter().map(|(_, g)| g.norm()).fold(0.0, f64::max)
    }

    /// Pointwise density at angle `theta` about the center.
    pub fn evaluate(&self, theta: f64) -> C64 {
        self.modes.iter().map(|(m, g)| g * m.angular(theta)).sum()
    }
}

/// Perfect plasmon wave: `r^k cos kθ` for `r < R`, `R^{2k} r^{-k} cos kθ`
/// outside. Continuous, and `∇·(A∇ψ) = 0` for the coreless `A`.
pub fn plasmon_wave(k: u32, r_shell: f64) -> Result<LayeredHarmonicField> {
    if k == 0 {
        return Err(Error::InvalidMode("plasmon waves need k >= 1".into()));
    }
    if !(r_shell > 0.0) {
        return Err(Error::InvalidGeometry(format!("shell radius must be positive, got {r_shell}")));
    }
    let mut f = LayeredHarmonicField::new(C64::new(0.0, 0.0), vec![r_shell])?;
    let amp = C64::new(r_shell.powi(k as i32), 0.0);
    f.set_mode(
        Mode::cos(k),
        vec![Band::new(amp, C64::new(0.0, 0.0)), Band::new(C64::new(0.0, 0.0), amp)],
    )?;
    Ok(f)
}

/// `∇·(a∇u)` concentrated on the circle `r = radius`:
/// `a_out ∂_r u|_out − a_in ∂_r u|_in`, per mode.
pub fn flux_jump(field: &LayeredHarmonicField, coefficient: &RadialProfile, radius: f64) -> LayerDensity {
    let a_in = coefficient.value(radius, Side::Inside);
    let a_out = coefficient.value(radius, Side::Outside);
    let modes = field
        .modes
        .keys()
        .map(|&m| {
            let (_, d_in) = field.radial_profile(m, radius, Side::Inside);
            let (_, d_out) = field.radial_profile(m, radius, Side::Outside);
            (m, a_out * d_out - a_in * d_in)
        })
        .collect();
    LayerDensity::with_mean(radius, field.center, modes)
}

/// Decaying solution of `−Δw = g·H¹⌊circle`: for amplitude `g` on mode `k`
/// at radius `a`, `w = (g a / 2k)(r/a)^k` inside and `(g a / 2k)(a/r)^k`
/// outside.
pub fn single_layer_solve(density: &LayerDensity) -> Result<LayeredHarmonicField> {
    let mut field = LayeredHarmonicField::new(density.center, vec![density.radius])?;
    let a = density.radius;
    let mut acc: BTreeMap<Mode, C64> = BTreeMap::new();
    for &(mode, g) in &density.modes {
        *acc.entry(mode).or_insert(C64::new(0.0, 0.0)) += g;
    }
    for (mode, g) in acc {
        if g.norm() == 0.0 {
            continue;
        }
        if mode.k == 0 {
            return Err(Error::NonzeroMean(format!("amplitude {g} on k = 0")));
        }
        let c = g * (a / (2.0 * mode.k as f64));
        field.set_mode(mode, vec![Band::new(c, C64::new(0.0, 0.0)), Band::new(C64::new(0.0, 0.0), c)])?;
    }
    Ok(field)
}
