//! Small numerical helpers shared across modules.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Binomial coefficient as a float; zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Smallest integer `k >= 1` with `base^{-k} < eta`, using strict comparison
/// (at equality the next integer is returned).
pub fn smallest_power_below(base: f64, eta: f64) -> Result<u32> {
    if !(base > 1.0) || !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need base > 1 and eta > 0, got base = {base}, eta = {eta}"
        )));
    }
    let mut k = 1u32;
    while base.powi(-(k as i32)) >= eta {
        k += 1;
        if k > 100_000 {
            return Err(Error::InvalidParameter(format!(
                "eta = {eta} too small for base {base}"
            )));
        }
    }
    Ok(k)
}

/// Gauss–Legendre rule with `n` nodes mapped to `[a, b]`, as (node, weight).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule.iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Equispaced angles `2πj/n`.
pub fn circle_angles(n: usize) -> impl Iterator<Item = f64> {
    let step = std::f64::consts::TAU / n as f64;
    (0..n).map(move |j| j as f64 * step)
}

/// Next power of two at or above `n`.
pub fn pow2_at_least(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// 1-norm condition number `‖A‖₁ ‖A⁻¹‖₁`, infinite when singular.
pub fn condition_1norm(a: &DMatrix<C64>) -> f64 {
    let norm1 = |m: &DMatrix<C64>| {
        (0..m.ncols())
            .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0_f64, f64::max)
    };
    match a.clone().try_inverse() {
        Some(inv) => norm1(a) * norm1(&inv),
        None => f64::INFINITY,
    }
}

/// Complex power `z^n` for signed `n` (with `0^0 = 1`).
pub fn cpow(z: C64, n: i64) -> C64 {
    if n >= 0 {
        z.powu(n as u32)
    } else {
        z.inv().powu((-n) as u32)
    }
}

/// Double-double number `hi + lo` (about 32 significant digits), enough to
/// keep trapezoid oracles accurate when the result is far smaller than the
/// integrand.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick(a: f64, b: f64) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn recip(self) -> Self {
        let y = Dd::new(1.0 / self.hi);
        // one Newton step doubles the precision
        y + y * (Dd::new(1.0) - self * y)
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::new(0.0);
        }
        let y = Dd::new(self.hi.sqrt());
        y + (self - y * y) * Dd::new(0.5 / y.hi)
    }

    pub fn powi(self, n: u32) -> Self {
        let (mut acc, mut base, mut e) = (Dd::new(1.0), self, n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::quick(s.hi, s.lo + t.hi);
        Dd::quick(r.hi, r.lo + t.lo)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Dd::quick(p, err + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        self * o.recip()
    }
}

/// The `n`-th roots of unity `(cos 2πj/n, sin 2πj/n)` in double-double, for
/// `n` a power of two, built by half-angle recursion from `e^{iπ} = −1`.
pub fn roots_of_unity_dd(n: usize) -> Option<Vec<(Dd, Dd)>> {
    if !n.is_power_of_two() {
        return None;
    }
    let mut roots = vec![(Dd::new(1.0), Dd::new(0.0))];
    // cosine of the current primitive angle 2π/len
    let mut c = Dd::new(1.0);
    let mut len = 1usize;
    while len < n {
        // halve the primitive angle
        let (nc, ns) = if len == 1 {
            (Dd::new(-1.0), Dd::new(0.0))
        } else {
            let half = Dd::new(0.5);
            let nc = ((Dd::new(1.0) + c) * half).sqrt();
            let ns = ((Dd::new(1.0) - c) * half).sqrt();
            (nc, ns)
        };
        c = nc;
        let s = ns;
        len *= 2;
        let mut next = Vec::with_capacity(len);
        for &(rc, rs) in &roots {
            next.push((rc, rs));
            next.push((rc * c - rs * s, rc * s + rs * c));
        }
        roots = next;
    }
    Some(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(3, -1), 0.0);
        assert!((binomial(60, 30) - 1.1826458156486e17).abs() / 1.18e17 < 1e-12);
    }

    #[test]
    fn smallest_power_is_strict() {
        assert_eq!(smallest_power_below(2.0, 0.5).unwrap(), 2);
        assert_eq!(smallest_power_below(2.0, 0.1).unwrap(), 4);
        assert!(smallest_power_below(1.0, 0.1).is_err());
    }

    #[test]
    fn double_double_roots() {
        let roots = roots_of_unity_dd(4096).unwrap();
        for j in [1usize, 100, 600, 1000, 2000, 3000, 4095] {
            let (c, s) = roots[j];
            let th = std::f64::consts::TAU * j as f64 / 4096.0;
            assert!((c.to_f64() - th.cos()).abs() < 1e-15);
            assert!((s.to_f64() - th.sin()).abs() < 1e-15);
            let one = c * c + s * s - Dd::new(1.0);
            assert!(one.to_f64().abs() < 1e-28);
        }
        let third = Dd::new(1.0) / Dd::new(3.0);
        assert!((third * Dd::new(3.0) - Dd::new(1.0)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre(5, 1.0, 3.0);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((s - (3f64.powi(8) - 1.0) / 8.0).abs() < 1e-10);
    }
}
