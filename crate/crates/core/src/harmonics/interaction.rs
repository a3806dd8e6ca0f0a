//! Interaction coefficients between origin-centered harmonics `Re(z^{-k})`
//! and shifted-center harmonics `(z − z0)^m` on a circle `∂B_ρ(z0)` that
//! encloses the origin.

use std::f64::consts::PI;

use crate::numerics::{binomial, cpow, roots_of_unity_dd, Dd};
use crate::{Error, Result, C64};

fn check_placement(rho: f64, z0: C64) -> Result<()> {
    if !(rho > 0.0) {
        return Err(Error::InvalidGeometry(format!("circle radius must be positive, got {rho}")));
    }
    if !(z0.norm() < rho) {
        return Err(Error::InvalidGeometry(format!(
            "origin must lie inside the circle: |z0| = {} >= rho = {rho}",
            z0.norm()
        )));
    }
    Ok(())
}

/// `I_{m,k} = ∫_{∂B_ρ(z0)} Re(z^{-k}) (z − z0)^m ds` in closed form.
///
/// By the residue theorem only the `z^{-k}` half contributes for `m ≥ 1`,
/// giving `π ρ C(m−1, m−k) (−z0)^{m−k}` for `m ≥ k ≥ 1` and zero for
/// `m < k`; for `m = 0` the value is `2πρ δ_{0k}`.
pub fn interaction_coeff(m: u32, k: u32, rho: f64, z0: C64) -> Result<C64> {
    check_placement(rho, z0)?;
    Ok(interaction_unchecked(m, k, rho, z0))
}

pub(crate) fn interaction_unchecked(m: u32, k: u32, rho: f64, z0: C64) -> C64 {
    if m == 0 {
        return if k == 0 { C64::new(2.0 * PI * rho, 0.0) } else { C64::new(0.0, 0.0) };
    }
    if k == 0 || m < k {
        return C64::new(0.0, 0.0);
    }
    let d = (m - k) as i64;
    PI * rho * binomial(m as i64 - 1, d) * cpow(-z0, d)
}

/// Trapezoid evaluation of the defining integral with `n` nodes; the
/// independent oracle for [`interaction_coeff`].
///
/// The integrand oscillates strongly for large `m − k` while the result is
/// tiny, so for power-of-two `n` the nodes and sums are carried in
/// double-double arithmetic; other node counts use plain `f64` nodes.
pub fn interaction_quadrature(m: u32, k: u32, rho: f64, z0: C64, n: usize) -> Result<C64> {
    check_placement(rho, z0)?;
    if n == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    Ok(quadrature_with_roots(m, k, rho, z0, &quadrature_roots(n)))
}

fn quadrature_roots(n: usize) -> Vec<(Dd, Dd)> {
    roots_of_unity_dd(n).unwrap_or_else(|| {
        crate::numerics::circle_angles(n).map(|t| (Dd::new(t.cos()), Dd::new(t.sin()))).collect()
    })
}

fn quadrature_with_roots(m: u32, k: u32, rho: f64, z0: C64, roots: &[(Dd, Dd)]) -> C64 {
    let n = roots.len();
    let r = Dd::new(rho);
    let rho_m = r.powi(m);
    let (x0, y0) = (Dd::new(z0.re), Dd::new(z0.im));
    let (mut re, mut im) = (Dd::default(), Dd::default());
    for (j, &(c, s)) in roots.iter().enumerate() {
        let (x, y) = (x0 + r * c, y0 + r * s);
        // Re(z^{-k}) = Re(conj(z)^k) / |z|^{2k}
        let (mut pr, mut pi) = (Dd::new(1.0), Dd::new(0.0));
        for _ in 0..k {
            let t = pr * x + pi * y;
            pi = pi * x - pr * y;
            pr = t;
        }
        let g = pr / (x * x + y * y).powi(k) * rho_m;
        // (z − z0)^m / ρ^m is the root with index m·j (mod n)
        let (wc, ws) = roots[(m as usize * j) % n];
        re = re + g * wc;
        im = im + g * ws;
    }
    let h = std::f64::consts::TAU / n as f64;
    C64::new(re.to_f64(), im.to_f64()) * (rho * h)
}

/// Table of `I_{m,k}` for `0 ≤ m ≤ M`, `0 ≤ k ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTable {
    pub rho: f64,
    pub z0: C64,
    /// `entries[m][k]`
    pub entries: Vec<Vec<C64>>,
}

impl InteractionTable {
    pub fn exact(rho: f64, z0: C64, m_max: u32, k_max: u32) -> Result<Self> {
        check_placement(rho, z0)?;
        let entries = (0..=m_max)
            .map(|m| (0..=k_max).map(|k| interaction_unchecked(m, k, rho, z0)).collect())
            .collect();
        Ok(Self { rho, z0, entries })
    }

    pub fn quadrature(rho: f64, z0: C64, m_max: u32, k_max: u32, nodes: usize) -> Result<Self> {
        check_placement(rho, z0)?;
        if nodes == 0 {
            return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
        }
        let roots = quadrature_roots(nodes);
        let entries = (0..=m_max)
            .map(|m| (0..=k_max).map(|k| quadrature_with_roots(m, k, rho, z0, &roots)).collect())
            .collect();
        Ok(Self { rho, z0, entries })
    }

    pub fn get(&self, m: u32, k: u32) -> C64 {
        self.entries[m as usize][k as usize]
    }
}

/// `Σ_{k=1}^{k_max} Q^k |I_{m,k}|`.
pub fn q_weighted_sum(m: u32, rho: f64, z0: C64, q: f64, k_max: u32) -> Result<f64> {
    check_placement(rho, z0)?;
    Ok((1..=k_max).map(|k| q.powi(k as i32) * interaction_unchecked(m, k, rho, z0).norm()).sum())
}

/// Upper bound `π ρ Q (|z0| + Q)^{m−1}` for [`q_weighted_sum`] (`m ≥ 1`).
pub fn q_weighted_bound(m: u32, rho: f64, z0: C64, q: f64) -> f64 {
    PI * rho * q * (z0.norm() + q).powi(m as i32 - 1)
}

/// Raised when the requested truncation cannot meet the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    pub order: u32,
    pub tail_bound: f64,
    pub tolerance: f64,
}

/// Expansion `Re(a z^{-k}) = Re Σ_m c_m (z − z0)^m` on `∂B_ρ(z0)`; the same
/// sum is the harmonic extension into the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedExpansion {
    pub rho: f64,
    pub z0: C64,
    pub k: u32,
    /// `coeffs[m]` for `0 ≤ m ≤ M` (zero below `k`).
    pub coeffs: Vec<C64>,
    /// Bound on `sup |Re Σ_{m>M} c_m (z − z0)^m|` over the closed disc.
    pub tail_bound: f64,
    pub warning: Option<TruncationWarning>,
}

impl ShiftedExpansion {
    /// Truncated sum at a point.
    pub fn evaluate(&self, z: C64) -> f64 {
        let w = z - self.z0;
        let mut p = C64::new(1.0, 0.0);
        let mut acc = 0.0;
        for c in &self.coeffs {
            acc += (c * p).re;
            p *= w;
        }
        acc
    }
}

/// Tail bound `Σ_{m>M} max_k-weight · (|z0|+Q)^{m−1} / ρ^m` for the expansion of
/// `Re(z^{-k})`, minimized over `Q ∈ (0, ρ − |z0|)`.
///
/// Uses `|I_{m,k}| ≤ π ρ Q^{1−k} (|z0|+Q)^{m−1}`, so
/// `|c_m| ρ^m ≤ Q^{1−k} (|z0|+Q)^{m−1} / ρ^m`.
pub(crate) fn shifted_tail_bound(k: u32, rho: f64, z0: C64, order: u32) -> f64 {
    let e = z0.norm();
    let gap = rho - e;
    let bound = |q: f64| {
        let t = (e + q) / rho;
        q.powi(1 - k as i32) * (e + q).powi(order as i32) / rho.powi(order as i32 + 1) / (1.0 - t)
    };
    if e == 0.0 {
        // only m = k is nonzero
        return if order >= k { 0.0 } else { rho.powi(-(k as i32)) };
    }
    // log-convex in Q; a fine scan followed by golden-section refinement
    let n = 200;
    let (mut best_q, mut best) = (gap * 0.5, f64::INFINITY);
    for i in 1..n {
        let q = gap * i as f64 / n as f64;
        let b = bound(q);
        if b < best {
            best = b;
            best_q = q;
        }
    }
    let (mut lo, mut hi) = ((best_q - gap / n as f64).max(gap * 1e-9), (best_q + gap / n as f64).min(gap * (1.0 - 1e-12)));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if bound(a) < bound(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    best.min(bound(0.5 * (lo + hi)))
}

/// Coefficients `c_m = conj(I_{m,k}) / (π ρ^{2m+1})` for `k ≤ m ≤ M` of the
/// shifted expansion of `Re(z^{-k})`, with the analytic tail bound and a
/// warning if it exceeds `tolerance`.
pub fn shifted_trace_expansion(k: u32, rho: f64, z0: C64, order: u32, tolerance: f64) -> Result<ShiftedExpansion> {
    check_placement(rho, z0)?;
    if k == 0 {
        return Err(Error::InvalidMode("shifted expansion needs k >= 1".into()));
    }
    let coeffs = (0..=order)
        .map(|m| interaction_unchecked(m, k, rho, z0).conj() / (PI * rho.powi(2 * m as i32 + 1)))
        .collect();
    let tail_bound = shifted_tail_bound(k, rho, z0, order);
    let warning = (tail_bound > tolerance).then_some(TruncationWarning { order, tail_bound, tolerance });
    Ok(ShiftedExpansion { rho, z0, k, coeffs, tail_bound, warning })
}

/// Re-expansion of `(z − z0)^n` about the origin.
///
/// For `n ≥ 0` the finite binomial sum `Σ_j C(n, j)(−z0)^{n−j} z^j` is
/// returned exactly; for `n < 0` the addition theorem
/// `(z − z0)^{−m} = Σ_{j≥0} C(m+j−1, j) z0^j z^{−m−j}` (valid for `|z| > |z0|`)
/// is truncated after `terms` terms. Entries are `(power of z, coefficient)`.
pub fn reexpand_about_origin(n: i32, z0: C64, terms: usize) -> Vec<(i32, C64)> {
    if n >= 0 {
        (0..=n)
            .map(|j| (j, binomial(n as i64, j as i64) * cpow(-z0, (n - j) as i64)))
            .collect()
    } else {
        let m = -n as i64;
        (0..terms as i64)
            .map(|j| ((-m - j) as i32, binomial(m + j - 1, j) * cpow(z0, j)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let v = interaction_coeff(3, 1, 0.5, C64::new(0.2, 0.0)).unwrap();
        assert!((v - C64::new(0.062_831_853_071_795_86, 0.0)).norm() < 1e-15);
        assert_eq!(interaction_coeff(2, 3, 0.7, C64::new(0.1, 0.2)).unwrap(), C64::new(0.0, 0.0));
        assert!((interaction_coeff(0, 0, 0.5, C64::new(0.1, 0.0)).unwrap() - PI).norm() < 1e-15);
        assert!(interaction_coeff(1, 1, 0.5, C64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn quadrature_oracle_agrees() {
        let z0 = C64::new(0.2, 0.0);
        let q = interaction_quadrature(3, 1, 0.5, z0, 4096).unwrap();
        assert!((q.re - 0.062_831_853_071_795_86).abs() / 0.0628 < 1e-10);
        let q = interaction_quadrature(0, 0, 0.5, z0, 64).unwrap();
        assert!((q - C64::new(PI, 0.0)).norm() < 1e-14);
        let q = interaction_quadrature(4, 2, 0.8, C64::new(0.0, 0.0), 256).unwrap();
        assert!(q.norm() < 1e-14);
    }

    #[test]
    fn exact_matches_quadrature_grid() {
        for (rho, z0) in [(0.5, C64::new(0.2, 0.0)), (0.9, C64::new(0.1, 0.05))] {
            let exact = InteractionTable::exact(rho, z0, 20, 20).unwrap();
            let quad = InteractionTable::quadrature(rho, z0, 20, 20, 4096).unwrap();
            for m in 0..=20 {
                for k in 0..=20 {
                    let (e, q) = (exact.get(m, k), quad.get(m, k));
                    if e.norm() == 0.0 {
                        // zero entries: compare against the integrand scale
                        let scale = rho.powi(m as i32) * (rho - z0.norm()).powi(-(k as i32)) * rho;
                        assert!(q.norm() <= 1e-10 * scale, "m={m} k={k}: {q}");
                    } else {
                        assert!((e - q).norm() / e.norm() <= 1e-10, "m={m} k={k}: {e} vs {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn q_bound_equality_for_real_z0() {
        for m in 1..15 {
            let s = q_weighted_sum(m, 0.9, C64::new(0.1, 0.0), 0.3, 40).unwrap();
            let b = q_weighted_bound(m, 0.9, C64::new(0.1, 0.0), 0.3);
            assert!((s - b).abs() / b < 1e-12, "m = {m}: {s} vs {b}");
            let s = q_weighted_sum(m, 0.9, C64::new(0.05, 0.07), 0.3, 40).unwrap();
            let b = q_weighted_bound(m, 0.9, C64::new(0.05, 0.07), 0.3);
            assert!(s <= b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn concentric_expansion_is_single_term() {
        let e = shifted_trace_expansion(3, 0.8, C64::new(0.0, 0.0), 10, 1e-12).unwrap();
        for (m, c) in e.coeffs.iter().enumerate() {
            let expect = if m == 3 { 0.8f64.powi(-6) } else { 0.0 };
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-12);
        }
        assert!(e.warning.is_none());
    }

    #[test]
    fn shifted_reconstruction_on_circle() {
        let (rho, z0) = (0.9, C64::new(0.1, 0.0));
        let e = shifted_trace_expansion(1, rho, z0, 40, 1e-8).unwrap();
        let mut worst: f64 = 0.0;
        for th in crate::numerics::circle_angles(64) {
            let z = z0 + C64::from_polar(rho, th);
            worst = worst.max((e.evaluate(z) - z.inv().re).abs());
        }
        assert!(worst <= 1e-8, "{worst}");
        assert!(e.tail_bound + 1e-14 >= worst);
    }

    #[test]
    fn truncation_warning_is_raised() {
        let e = shifted_trace_expansion(2, 0.5, C64::new(0.4, 0.0), 5, 1e-10).unwrap();
        let w = e.warning.expect("short truncation must warn");
        assert!(w.tail_bound > 1e-10);
    }

    #[test]
    fn reexpansion_examples() {
        let z0 = C64::new(0.3, -0.1);
        let pos = reexpand_about_origin(2, z0, 0);
        assert_eq!(pos.len(), 3);
        assert!((pos[0].1 - z0 * z0).norm() < 1e-15);
        assert!((pos[1].1 + 2.0 * z0).norm() < 1e-15);
        assert!((pos[2].1 - C64::new(1.0, 0.0)).norm() < 1e-15);
        let single = reexpand_about_origin(-1, C64::new(0.0, 0.0), 5);
        assert_eq!(single[0], (-1, C64::new(1.0, 0.0)));
        assert!(single[1..].iter().all(|(_, c)| c.norm() == 0.0));
        let z0 = C64::new(0.3, 0.0);
        let terms = reexpand_about_origin(-2, z0, 30);
        for th in crate::numerics::circle_angles(32) {
            let z = C64::from_polar(0.9, th);
            let direct = (z - z0).powi(-2);
            let series: C64 = terms.iter().map(|(p, c)| c * cpow(z, *p as i64)).sum();
            assert!((direct - series).norm() < 1e-10);
        }
    }
}
