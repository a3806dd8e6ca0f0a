//! Coreless shells `D_R = Φ(B_R)` under a polynomial conformal map: mapped
//! plasmon waves, the cutoff dual certificate and a free-space Poisson
//! solver.
//!
//! The dual trial field is `ψ = λ h ψ̃_k` with `ψ̃_k = ψ̂_k ∘ Ψ` and the
//! cutoff `h = χ(|Ψ|)`; `v = −(λ/η) u` with `Δu = Δ(hψ̃_k)` restricted to the
//! cutoff annulus. Dirichlet energies are conformally invariant and
//! `ln|Φ(z) − Φ(w)| = ln|z − w| + ln|(Φ(z) − Φ(w))/(z − w)|`, so every term is
//! computed in preimage coordinates: a radial Green integral plus a smooth
//! double integral, both spectrally accurate.

use std::f64::consts::{PI, TAU};

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::certificates::{DualQuadratic, DualTerms};
use crate::harmonics::{plasmon_wave, LayeredHarmonicField, Side};
use crate::numerics::{circle_angles, gauss_legendre, pow2_at_least};
use crate::radial::SourceSpectrum;
use crate::{Error, Result, C64};

/// Largest degree accepted by the analytic injectivity certificate.
pub const MAX_ANALYTIC_DEGREE: usize = 6;

/// `Φ(z) = z + c₂z² + … + c_d z^d` with radii `R < q < Q < s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialMap {
    /// `c₂, …, c_d`
    pub coeffs: Vec<C64>,
    pub r_shell: f64,
    pub q: f64,
    /// Inner radius `Q` of the cutoff annulus (in preimage coordinates).
    pub cutoff: f64,
    pub s: f64,
}

/// Evidence that `Φ` is injective on `B_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Injectivity {
    /// `Σ_{j≥2} j|c_j| s^{j−1}`; `< 1` forces `Re Φ' > 0` on `B_s`.
    pub derivative_bound: f64,
    pub analytic: bool,
    /// Winding number of `Φ(∂B_s)` about `Φ(0)`.
    pub winding: i64,
    /// Winding number of `Φ'(∂B_s)` about 0 (zeros of `Φ'` in `B_s`).
    pub critical_points: i64,
    pub numeric: bool,
}

impl Injectivity {
    pub fn holds(&self) -> bool {
        self.analytic || self.numeric
    }
}

fn winding_number(values: &[C64]) -> i64 {
    let mut total = 0.0;
    for i in 0..values.len() {
        let a = values[i];
        let b = values[(i + 1) % values.len()];
        total += (b / a).arg();
    }
    (total / TAU).round() as i64
}

impl PolynomialMap {
    /// Validates `1 < R < q < Q < s`, `s > q²/R` and injectivity. `Q`
    /// defaults to the midpoint of `(q²/R, s)`.
    pub fn new(coeffs: Vec<C64>, r_shell: f64, q: f64, s: f64, cutoff: Option<f64>) -> Result<Self> {
        if !(r_shell > 1.0 && q > r_shell && s > q && s.is_finite()) {
            return Err(Error::InvalidGeometry(format!("need 1 < R < q < s, got R = {r_shell}, q = {q}, s = {s}")));
        }
        let threshold = q * q / r_shell;
        if !(s > threshold) {
            return Err(Error::InvalidGeometry(format!("need s > q²/R = {threshold}, got s = {s}")));
        }
        let cutoff = cutoff.unwrap_or(0.5 * (threshold + s));
        if !(cutoff > threshold && cutoff < s) {
            return Err(Error::InvalidGeometry(format!(
                "cutoff radius Q = {cutoff} must lie in (q²/R, s) = ({threshold}, {s})"
            )));
        }
        let map = Self { coeffs, r_shell, q, cutoff, s };
        let inj = map.injectivity();
        if !inj.holds() {
            return Err(Error::InvalidGeometry(format!(
                "map is not certified injective on B_s: derivative bound {}, winding {}, critical points {}",
                inj.derivative_bound, inj.winding, inj.critical_points
            )));
        }
        Ok(map)
    }

    pub fn identity(r_shell: f64, q: f64, s: f64, cutoff: Option<f64>) -> Result<Self> {
        Self::new(Vec::new(), r_shell, q, s, cutoff)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn phi(&self, z: C64) -> C64 {
        // Horner on z(1 + c₂z + … )
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        z * (acc * z + 1.0)
    }

    pub fn dphi(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * z + c * (i + 2) as f64;
        }
        acc * z + 1.0
    }

    /// `(Φ(z) − Φ(w))/(z − w)`, equal to `Φ'(z)` on the diagonal.
    pub fn divided_difference(&self, z: C64, w: C64) -> C64 {
        let mut total = C64::new(1.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = i + 2;
            // Σ_{a=0}^{j−1} z^a w^{j−1−a}
            let mut sum = C64::new(0.0, 0.0);
            let mut zp = C64::new(1.0, 0.0);
            for a in 0..j {
                sum += zp * w.powu((j - 1 - a) as u32);
                zp *= z;
            }
            total += c * sum;
        }
        total
    }

    pub fn injectivity(&self) -> Injectivity {
        let derivative_bound: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i + 2) as f64 * c.norm() * self.s.powi(i as i32 + 1))
            .sum();
        let analytic = self.degree() <= MAX_ANALYTIC_DEGREE && derivative_bound < 1.0;
        let n = 4096;
        let boundary: Vec<C64> = circle_angles(n).map(|t| C64::from_polar(self.s, t)).collect();
        let origin = self.phi(C64::new(0.0, 0.0));
        let winding = winding_number(&boundary.iter().map(|&z| self.phi(z) - origin).collect::<Vec<_>>());
        let critical_points = winding_number(&boundary.iter().map(|&z| self.dphi(z)).collect::<Vec<_>>());
        Injectivity { derivative_bound, analytic, winding, critical_points, numeric: winding == 1 && critical_points == 0 }
    }

    /// `Ψ(w)`: the preimage in `B_s` of a point of `D_s`, by Newton's
    /// method with a homotopy fallback. Fails outside `D_s`.
    pub fn invert(&self, w: C64) -> Result<C64> {
        let tol = 1e-13 * w.norm().max(1.0);
        let newton = |mut z: C64, target: C64| -> Option<C64> {
            for _ in 0..60 {
                let f = self.phi(z) - target;
                if f.norm() <= tol {
                    return Some(z);
                }
                let d = self.dphi(z);
                if d.norm() == 0.0 {
                    return None;
                }
                z -= f / d;
                if !z.re.is_finite() || !z.im.is_finite() {
                    return None;
                }
            }
            ((self.phi(z) - target).norm() <= 10.0 * tol).then_some(z)
        };
        let z = newton(w, w).or_else(|| {
            let steps = 64;
            let mut z = C64::new(0.0, 0.0);
            for i in 1..=steps {
                z = newton(z, w * (i as f64 / steps as f64))?;
            }
            Some(z)
        });
        match z {
            Some(z) if z.norm() <= self.s * (1.0 + 1e-12) => Ok(z),
            Some(z) => Err(Error::InvalidParameter(format!("{w} lies outside D_s (preimage radius {})", z.norm()))),
            None => Err(Error::NotConverged(format!("inverse map did not converge at {w}"))),
        }
    }
}

/// `ψ̃_k = ψ̂_k ∘ Ψ` at a physical point: value and gradient `(∂_x, ∂_y)`.
/// `side` picks the one-sided limit on `∂D_R`.
pub fn mapped_plasmon(map: &PolynomialMap, k: u32, x: C64, side: Side) -> Result<(f64, (f64, f64))> {
    let psi = plasmon_wave(k, map.r_shell)?;
    let z = map.invert(x)?;
    Ok(mapped_eval(map, &psi, z, side))
}

fn mapped_eval(map: &PolynomialMap, psi: &LayeredHarmonicField, z: C64, side: Side) -> (f64, (f64, f64)) {
    mapped_eval_polar(map, psi, z.norm(), z.arg(), side)
}

fn mapped_eval_polar(map: &PolynomialMap, psi: &LayeredHarmonicField, r: f64, t: f64, side: Side) -> (f64, (f64, f64)) {
    let z = C64::from_polar(r, t);
    let (u, ur, ut) = psi.eval_polar(r, t, side);
    let e = C64::from_polar(1.0, t);
    // complex gradient ∂_x + i∂_y in z, pulled back by conj(Ψ') = conj(1/Φ')
    let grad_z = e * (ur.re + C64::new(0.0, 1.0) * ut.re / r);
    let grad_x = grad_z * map.dphi(z).inv().conj();
    (u.re, (grad_x.re, grad_x.im))
}

/// `k(η) = round(ln η / ln(R/Q))`, at least 1, and `λ_η² = (1/k)(Q/R³)^k`.
pub fn certificate_schedule(map: &PolynomialMap, eta: f64) -> Result<(u32, f64)> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!("loss eta must be positive, got {eta}")));
    }
    let k = (eta.ln() / (map.r_shell / map.cutoff).ln()).round().max(1.0) as u32;
    Ok((k, schedule_lambda(map, k)))
}

fn schedule_lambda(map: &PolynomialMap, k: u32) -> f64 {
    ((map.cutoff / map.r_shell.powi(3)).powi(k as i32) / k as f64).sqrt()
}

/// Quintic smoothstep cutoff `χ` on `[Q, s]` with its first two derivatives.
fn cutoff(map: &PolynomialMap, r: f64) -> (f64, f64, f64) {
    let width = map.s - map.cutoff;
    let t = ((r - map.cutoff) / width).clamp(0.0, 1.0);
    let s0 = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    let s1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    let s2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    (1.0 - s0, -s1 / width, -s2 / (width * width))
}

/// Radial density `γ(r)` of `Δ(χ ψ̂_k) = γ(r) cos kθ` on `[Q, s]`, scaled
/// by `R^{−2k}`.
fn gamma(map: &PolynomialMap, k: u32, r: f64) -> f64 {
    let kf = k as f64;
    let g = r.powi(-(k as i32));
    let dg = -kf * g / r;
    let (_, c1, c2) = cutoff(map, r);
    c2 * g + 2.0 * c1 * dg + c1 * g / r
}

/// Resolution of the certificate quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    /// Gauss–Legendre nodes on the cutoff annulus `[Q, s]`.
    pub radial: usize,
    /// Extra angular nodes beyond `2k` for the smooth kernel and `|Φ'|`.
    pub angular_extra: usize,
}

impl Resolution {
    fn doubled(self) -> Self {
        Self { radial: 2 * self.radial, angular_extra: 2 * self.angular_extra }
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self { radial: 16, angular_extra: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalOptions {
    /// Replaces the schedule `k(η)`.
    pub k: Option<u32>,
    /// Replaces the schedule `λ_η`.
    pub lambda: Option<f64>,
    pub resolution: Resolution,
    /// Largest relative change of any term under grid doubling.
    pub convergence_tolerance: f64,
}

impl Default for ConformalOptions {
    fn default() -> Self {
        Self { k: None, lambda: None, resolution: Resolution::default(), convergence_tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedCertificate {
    pub eta: f64,
    pub k: u32,
    pub lambda: f64,
    /// `J` at `lambda`: a certified lower bound for `E_η`.
    pub j_lower: f64,
    pub terms: DualTerms,
    pub quadratic: DualQuadratic,
    pub lambda_optimal: f64,
    pub j_optimal: f64,
    /// Largest relative change of the quadratic's coefficients under grid
    /// doubling.
    pub convergence: f64,
}

/// Coefficients `(a, ∫|∇(hψ̃)|², ∫|∇u|²)` at one resolution.
fn raw_terms(map: &PolynomialMap, source: &SourceSpectrum, k: u32, res: Resolution) -> (f64, f64, f64) {
    let (r, q) = (map.r_shell, map.q);
    let kf = k as f64;
    let ki = k as i32;
    let r2k = r.powi(2 * ki);

    // coupling ∫_{∂D_q} F ψ̃ ds = ∫ F∘Φ · R^{2k}q^{−k} cos kθ · |Φ'| q dθ
    let n_c = pow2_at_least(2 * (k as usize + source.max_k() as usize) + 4 * res.angular_extra);
    let entries = source.entries();
    let coupling: f64 = circle_angles(n_c)
        .map(|t| {
            let f: f64 = entries.iter().map(|(m, a)| a * m.angular(t)).sum();
            f * (kf * t).cos() * map.dphi(C64::from_polar(q, t)).norm()
        })
        .sum::<f64>()
        * (TAU / n_c as f64)
        * q
        * r2k
        * q.powi(-ki);

    // ∫|∇(χψ̂)|²: closed form on [0, Q], quadrature on [Q, s]
    let big_q = map.cutoff;
    let inner = PI * kf * r2k * (2.0 - (r / big_q).powi(2 * ki));
    let nodes = gauss_legendre(res.radial, big_q, map.s);
    let tail: f64 = nodes
        .iter()
        .map(|&(x, w)| {
            let (c0, c1, _) = cutoff(map, x);
            let g = x.powi(-ki);
            let f = c0 * g;
            let df = c1 * g - c0 * kf * g / x;
            w * PI * (df * df + kf * kf * f * f / (x * x)) * x
        })
        .sum::<f64>()
        * r2k
        * r2k;
    let psi_energy = inner + tail;

    // ∫|∇u|² = (π/k)∫ r^{1−k}γ(r)∫_Q^r t^{k+1}γ(t) dt dr  (circular part)
    let mut circular = 0.0;
    for &(x, w) in &nodes {
        let inner_nodes = gauss_legendre(res.radial, big_q, x);
        let acc: f64 = inner_nodes
            .iter()
            .map(|&(t, wt)| wt * (t / x).powi(ki) * t * gamma(map, k, t))
            .sum();
        circular += w * x * gamma(map, k, x) * acc;
    }
    circular *= PI / kf;

    // smooth part −(1/2π)∫∫ ln|D(z,w)| G̃(z) G̃(w)
    let smooth = if map.coeffs.is_empty() {
        0.0
    } else {
        let n_t = pow2_at_least(2 * k as usize + res.angular_extra);
        let h = TAU / n_t as f64;
        let mut pts = Vec::with_capacity(nodes.len() * n_t);
        for &(x, w) in &nodes {
            let weight = w * x * gamma(map, k, x) * h;
            for t in circle_angles(n_t) {
                pts.push((C64::from_polar(x, t), weight * (kf * t).cos()));
            }
        }
        let mut total = 0.0;
        for i in 0..pts.len() {
            let (zi, wi) = pts[i];
            total += wi * wi * map.dphi(zi).norm().ln();
            let mut row = 0.0;
            for &(zj, wj) in &pts[i + 1..] {
                row += wj * map.divided_difference(zi, zj).norm().ln();
            }
            total += 2.0 * wi * row;
        }
        -total / TAU
    };
    let u_energy = (circular + smooth) * r2k * r2k;
    (coupling, psi_energy, u_energy)
}

fn rel_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Dual certificate `J = ∫fψ − (η/2)∫|∇ψ|² − (η/2)∫|∇v|²` for a source
/// given by the coefficients of `F ∘ Φ` on `∂B_q`.
pub fn dual_certificate(
    map: &PolynomialMap,
    source: &SourceSpectrum,
    eta: f64,
    options: ConformalOptions,
) -> Result<MappedCertificate> {
    let (k_sched, _) = certificate_schedule(map, eta)?;
    let k = options.k.unwrap_or(k_sched);
    if k == 0 {
        return Err(Error::InvalidMode("the plasmon index must be at least 1".into()));
    }
    let lambda = options.lambda.unwrap_or_else(|| schedule_lambda(map, k));
    let coarse = raw_terms(map, source, k, options.resolution);
    let fine = raw_terms(map, source, k, options.resolution.doubled());
    let convergence = rel_change(coarse.0, fine.0)
        .max(rel_change(coarse.1, fine.1))
        .max(rel_change(coarse.2, fine.2));
    if convergence > options.convergence_tolerance {
        return Err(Error::NotConverged(format!(
            "certificate terms changed by {convergence:e} under grid doubling (tolerance {:e})",
            options.convergence_tolerance
        )));
    }
    let quadratic = DualQuadratic { a: fine.0, b_psi: 0.5 * eta * fine.1, b_v: fine.2 / (2.0 * eta) };
    let terms = quadratic.terms(lambda);
    Ok(MappedCertificate {
        eta,
        k,
        lambda,
        j_lower: terms.total(),
        terms,
        quadratic,
        lambda_optimal: quadratic.optimal_lambda(),
        j_optimal: quadratic.optimum(),
        convergence,
    })
}

/// Uniform polar grid `r_i = r_min + i·(r_max − r_min)/(n_r − 1)`,
/// `θ_j = 2πj/n_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl PolarGrid {
    pub fn radius(&self, i: usize) -> f64 {
        self.r_min + (self.r_max - self.r_min) * i as f64 / (self.n_r - 1) as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_theta as f64
    }

    /// Samples `g` at every node, row-major in `r`.
    pub fn sample(&self, g: impl Fn(C64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_r * self.n_theta);
        for i in 0..self.n_r {
            for j in 0..self.n_theta {
                out.push(g(C64::from_polar(self.radius(i), self.angle(j))));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    /// `∫|∇v|²` over the plane.
    pub energy: f64,
    /// Angular coefficients `v_n(r_i)`, `n = 0..=n_θ/2`.
    pub modes: Vec<Vec<C64>>,
    pub grid: PolarGrid,
}

impl PoissonSolution {
    /// Field value at a grid radius index and angle.
    pub fn value(&self, i: usize, theta: f64) -> f64 {
        let half = self.grid.n_theta / 2;
        self.modes
            .iter()
            .enumerate()
            .map(|(n, m)| {
                let w = if n == 0 || n == half { 1.0 } else { 2.0 };
                w * (m[i] * C64::from_polar(1.0, n as f64 * theta)).re
            })
            .sum()
    }
}

/// Bounded solution of `Δv = g` in the plane for `g` sampled on a polar
/// grid and vanishing on its first and last ring; per-mode radial Green
/// integrals by the trapezoid rule, energy `−∫ v g` by Parseval.
pub fn poisson_free_space(grid: &PolarGrid, samples: &[f64]) -> Result<PoissonSolution> {
    if !(grid.r_min >= 0.0 && grid.r_max > grid.r_min && grid.n_r >= 3 && grid.n_theta >= 4) {
        return Err(Error::InvalidParameter(format!("degenerate polar grid {grid:?}")));
    }
    if samples.len() != grid.n_r * grid.n_theta {
        return Err(Error::InvalidParameter(format!(
            "expected {} samples, got {}",
            grid.n_r * grid.n_theta,
            samples.len()
        )));
    }
    let nt = grid.n_theta;
    let first = &samples[..nt];
    let last = &samples[(grid.n_r - 1) * nt..];
    if first.iter().chain(last).any(|&g| g != 0.0) {
        return Err(Error::InvalidParameter("source support must lie strictly inside the grid".into()));
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nt);
    let half = nt / 2;
    let mut ghat = vec![vec![C64::new(0.0, 0.0); grid.n_r]; half + 1];
    for i in 0..grid.n_r {
        let mut row: Vec<C64> = samples[i * nt..(i + 1) * nt].iter().map(|&g| C64::new(g, 0.0)).collect();
        fft.process(&mut row);
        for (n, g) in ghat.iter_mut().enumerate() {
            g[i] = row[n] / nt as f64;
        }
    }
    let h = (grid.r_max - grid.r_min) / (grid.n_r - 1) as f64;
    let radii: Vec<f64> = (0..grid.n_r).map(|i| grid.radius(i)).collect();
    let mut modes = Vec::with_capacity(half + 1);
    let mut energy = 0.0;
    for (n, g) in ghat.iter().enumerate() {
        let m = grid.n_r;
        let mut v = vec![C64::new(0.0, 0.0); m];
        if n == 0 {
            // v₀ = ln r ∫_{r_min}^r t g dt + ∫_r t ln t g dt
            let mut a = vec![C64::new(0.0, 0.0); m];
            let mut b = vec![C64::new(0.0, 0.0); m];
            for i in 1..m {
                a[i] = a[i - 1] + 0.5 * h * (radii[i - 1] * g[i - 1] + radii[i] * g[i]);
            }
            let tl = |i: usize| if radii[i] > 0.0 { radii[i] * radii[i].ln() } else { 0.0 };
            for i in (0..m - 1).rev() {
                b[i] = b[i + 1] + 0.5 * h * (tl(i) * g[i] + tl(i + 1) * g[i + 1]);
            }
            for i in 0..m {
                let lr = if radii[i] > 0.0 { radii[i].ln() } else { 0.0 };
                v[i] = lr * a[i] + b[i];
            }
        } else {
            let ni = n as i32;
            // scaled Â(r) = r^{−n}∫ t^{n+1} g, B̂(r) = r^n ∫_r t^{1−n} g
            let mut a = vec![C64::new(0.0, 0.0); m];
            let mut b = vec![C64::new(0.0, 0.0); m];
            for i in 1..m {
                if radii[i - 1] == 0.0 {
                    a[i] = 0.5 * h * radii[i] * g[i];
                    continue;
                }
                let ratio = (radii[i - 1] / radii[i]).powi(ni);
                a[i] = a[i - 1] * ratio + 0.5 * h * (ratio * radii[i - 1] * g[i - 1] + radii[i] * g[i]);
            }
            for i in (0..m - 1).rev() {
                if radii[i] == 0.0 {
                    continue;
                }
                let ratio = (radii[i] / radii[i + 1]).powi(ni);
                b[i] = b[i + 1] * ratio + 0.5 * h * (radii[i] * g[i] + ratio * radii[i + 1] * g[i + 1]);
            }
            for i in 0..m {
                v[i] = -(a[i] + b[i]) / (2.0 * n as f64);
            }
        }
        let weight = if n == 0 || n == half { 1.0 } else { 2.0 };
        let mut integral = 0.0;
        for i in 0..m {
            let w = if i == 0 || i == m - 1 { 0.5 * h } else { h };
            integral += w * (v[i] * g[i].conj()).re * radii[i];
        }
        energy -= TAU * weight * integral;
        modes.push(v);
    }
    Ok(PoissonSolution { energy, modes, grid: *grid })
}

/// `Δ(h ψ̃_k)` on the cutoff annulus at a physical point, zero elsewhere;
/// the source term of the `v` equation up to the factor `−λ/η`.
pub fn cutoff_source(map: &PolynomialMap, k: u32, x: C64) -> f64 {
    let z = match map.invert(x) {
        Ok(z) => z,
        Err(_) => return 0.0,
    };
    let r = z.norm();
    if r <= map.cutoff || r >= map.s {
        return 0.0;
    }
    let r2k = map.r_shell.powi(2 * k as i32);
    gamma(map, k, r) * r2k * (k as f64 * z.arg()).cos() / map.dphi(z).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::dual_nocore;

    fn quadratic_map() -> PolynomialMap {
        PolynomialMap::new(vec![C64::new(0.1, 0.0)], 1.5, 1.7, 2.2, Some(2.1)).unwrap()
    }

    #[test]
    fn validation() {
        assert!(PolynomialMap::identity(1.5, 1.7, 1.9, None).is_err()); // s ≤ q²/R
        assert!(PolynomialMap::new(vec![C64::new(0.1, 0.0)], 1.5, 1.7, 2.2, Some(1.9)).is_err());
        assert!(PolynomialMap::new(vec![C64::new(0.5, 0.0)], 1.5, 1.7, 2.2, Some(2.1)).is_err());
        let m = quadratic_map();
        let inj = m.injectivity();
        assert!(inj.analytic && inj.numeric);
        assert!((inj.derivative_bound - 0.44).abs() < 1e-15);
        let id = PolynomialMap::identity(1.5, 1.7, 2.2, None).unwrap();
        assert!((id.cutoff - 0.5 * (1.7 * 1.7 / 1.5 + 2.2)).abs() < 1e-15);
    }

    #[test]
    fn inverse_round_trips() {
        let id = PolynomialMap::identity(1.5, 1.7, 2.2, Some(2.1)).unwrap();
        let w = C64::new(0.3, -1.1);
        assert_eq!(id.invert(w).unwrap(), w);
        let m = quadratic_map();
        let z = C64::new(1.3, 0.2);
        assert!((m.invert(m.phi(z)).unwrap() - z).norm() <= 1e-12);
        // 10³ points of the closed region D_Q
        let mut worst: f64 = 0.0;
        for i in 0..40 {
            for j in 0..25 {
                let z = C64::from_polar(m.cutoff * (i as f64 + 0.5) / 40.0 * 1.0, TAU * j as f64 / 25.0);
                let w = m.phi(z);
                worst = worst.max((m.phi(m.invert(w).unwrap()) - w).norm());
            }
        }
        assert!(worst <= 1e-12, "{worst}");
        for t in circle_angles(64) {
            let z = m.invert(m.phi(C64::from_polar(m.q, t))).unwrap();
            assert!((z.norm() - m.q).abs() <= 1e-10);
        }
        assert!(m.invert(C64::new(30.0, 0.0)).is_err());
    }

    #[test]
    fn mapped_plasmon_is_a_harmonic() {
        let m = quadratic_map();
        let psi = plasmon_wave(5, m.r_shell).unwrap();
        let mut worst: f64 = 0.0;
        for t in circle_angles(256) {
            let z = C64::from_polar(m.r_shell, t);
            let d = m.dphi(z);
            let nu = (d * C64::from_polar(1.0, t)) / d.norm();
            let (_, gi) = mapped_eval_polar(&m, &psi, m.r_shell, t, Side::Inside);
            let (_, go) = mapped_eval_polar(&m, &psi, m.r_shell, t, Side::Outside);
            let dn_in = gi.0 * nu.re + gi.1 * nu.im;
            let dn_out = go.0 * nu.re + go.1 * nu.im;
            // A = −1 inside D_R, +1 outside
            let jump = dn_out + dn_in;
            let scale = (gi.0.hypot(gi.1)).max(go.0.hypot(go.1));
            worst = worst.max(jump.abs() / scale);
        }
        assert!(worst <= 1e-8, "{worst}");
        // gradient agrees with finite differences of the composition
        let x = m.phi(C64::new(1.0, 0.4));
        let (_, g) = mapped_plasmon(&m, 3, x, Side::Inside).unwrap();
        let step = 1e-6;
        let f = |p: C64| mapped_plasmon(&m, 3, p, Side::Inside).unwrap().0;
        let gx = (f(x + step) - f(x - step)) / (2.0 * step);
        let gy = (f(x + C64::new(0.0, step)) - f(x - C64::new(0.0, step))) / (2.0 * step);
        assert!((gx - g.0).abs() < 1e-6 && (gy - g.1).abs() < 1e-6, "{gx} {gy} {g:?}");
    }

    #[test]
    fn schedule_examples() {
        let m = PolynomialMap::identity(1.5, 1.7, 2.2, Some(2.1)).unwrap();
        let (k, lam) = certificate_schedule(&m, 1e-3).unwrap();
        assert_eq!(k, 21);
        assert!((lam * lam - (2.1f64 / 3.375).powi(21) / 21.0).abs() <= 1e-15 * lam * lam);
        assert_eq!(certificate_schedule(&m, 1.5 / 2.1).unwrap().0, 1);
        assert_eq!(certificate_schedule(&m, 0.99).unwrap().0, 1);
    }

    #[test]
    fn zero_lambda_gives_zero() {
        let m = quadratic_map();
        let opts = ConformalOptions { lambda: Some(0.0), ..Default::default() };
        let c = dual_certificate(&m, &SourceSpectrum::algebraic(2.0, 10), 1e-3, opts).unwrap();
        assert_eq!(c.j_lower, 0.0);
    }

    #[test]
    fn identity_map_matches_nocore_closed_form() {
        let m = PolynomialMap::identity(1.5, 1.7, 2.2, Some(2.1)).unwrap();
        let k = 120;
        let alpha = 1.0 / (k * k) as f64;
        let src = SourceSpectrum::single(k, alpha).unwrap();
        for eta in [1e-2, 1e-5, 1e-8] {
            let opts = ConformalOptions { k: Some(k), ..Default::default() };
            let c = dual_certificate(&m, &src, eta, opts).unwrap();
            let reference = dual_nocore(1.5, 1.7, k, alpha, eta, Some(c.lambda)).unwrap();
            assert!((c.j_lower - reference.j).abs() <= 1e-6 * reference.j.abs(), "{} vs {}", c.j_lower, reference.j);
        }
    }

    #[test]
    fn grid_oracle_matches_radial_energy() {
        // identity map: the semi-analytic v-energy against the polar grid
        let m = PolynomialMap::identity(1.5, 1.7, 2.2, Some(2.1)).unwrap();
        let k = 3;
        let (_, _, u) = raw_terms(&m, &SourceSpectrum::single(1, 1.0).unwrap(), k, Resolution::default());
        let grid = PolarGrid { r_min: 2.0, r_max: 2.3, n_r: 3001, n_theta: 32 };
        let samples = grid.sample(|x| cutoff_source(&m, k, x));
        let sol = poisson_free_space(&grid, &samples).unwrap();
        assert!((sol.energy - u).abs() <= 1e-5 * u, "{} vs {u}", sol.energy);
    }

    #[test]
    fn grid_oracle_matches_mapped_energy() {
        let m = quadratic_map();
        let k = 4;
        let (_, _, u) = raw_terms(&m, &SourceSpectrum::single(1, 1.0).unwrap(), k, Resolution::default());
        let grid = PolarGrid { r_min: 1.5, r_max: 2.9, n_r: 1401, n_theta: 256 };
        let samples = grid.sample(|x| cutoff_source(&m, k, x));
        let sol = poisson_free_space(&grid, &samples).unwrap();
        assert!((sol.energy - u).abs() <= 1e-3 * u, "{} vs {u}", sol.energy);
    }

    #[test]
    fn poisson_rejects_support_on_boundary() {
        let grid = PolarGrid { r_min: 1.0, r_max: 2.0, n_r: 11, n_theta: 8 };
        assert!(poisson_free_space(&grid, &vec![1.0; 88]).is_err());
    }

    #[test]
    fn poisson_single_mode_closed_form() {
        // g = cos(2θ) on 1 < r < 2 (smooth bump profile)
        let grid = PolarGrid { r_min: 0.5, r_max: 2.5, n_r: 4001, n_theta: 16 };
        let prof = |r: f64| if r > 1.0 && r < 2.0 { ((r - 1.0) * (2.0 - r)).powi(3) } else { 0.0 };
        let samples = grid.sample(|x| prof(x.norm()) * (2.0 * x.arg()).cos());
        let sol = poisson_free_space(&grid, &samples).unwrap();
        // (π/k)∫∫ r t (r_</r_>)^k γγ by nested Gauss–Legendre
        let k = 2;
        let outer = gauss_legendre(40, 1.0, 2.0);
        let mut e = 0.0;
        for &(x, w) in &outer {
            let acc: f64 = gauss_legendre(40, 1.0, x).iter().map(|&(t, wt)| wt * (t / x).powi(k) * t * prof(t)).sum();
            e += w * x * prof(x) * acc;
        }
        e *= PI / k as f64;
        assert!((sol.energy - e).abs() <= 1e-6 * e, "{} vs {e}", sol.energy);
    }
}
