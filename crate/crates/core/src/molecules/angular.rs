//! Wigner 3j, 6j and 9j symbols (Racah formulas) over half-integers.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A non-negative or signed half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub fn new(x: f64) -> Result<Self> {
        let t = 2.0 * x;
        if !t.is_finite() || (t - t.round()).abs() > 1e-9 || t.abs() > 1e6 {
            return Err(Error::AngularMomentum(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt(t.round() as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// 2j + 1
    pub const fn multiplicity(self) -> i32 {
        self.0 + 1
    }

    /// j(j+1)
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    /// j, j−1, …, −j
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let t = self.0;
        (0..=t).map(move |k| HalfInt(t - 2 * k))
    }

    /// All values from |a − b| to a + b in integer steps.
    pub fn couple(a: HalfInt, b: HalfInt) -> impl Iterator<Item = HalfInt> {
        let lo = (a.0 - b.0).abs();
        let hi = a.0 + b.0;
        (lo..=hi).step_by(2).map(HalfInt)
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        HalfInt::new(x).map_err(serde::de::Error::custom)
    }
}

fn factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = vec![1.0f64; 171];
        for i in 1..171 {
            v[i] = v[i - 1] * i as f64;
        }
        v
    })
}

/// n! for an integer given as twice its value.
fn fact2(twice_n: i32) -> f64 {
    debug_assert!(twice_n >= 0 && twice_n % 2 == 0);
    factorials()[(twice_n / 2) as usize]
}

fn sign(twice_exp: i32) -> f64 {
    debug_assert!(twice_exp % 2 == 0);
    if (twice_exp / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

fn delta(a: i32, b: i32, c: i32) -> f64 {
    (fact2(a + b - c) * fact2(a - b + c) * fact2(-a + b + c) / fact2(a + b + c + 2)).sqrt()
}

/// ( j1 j2 j3 ; m1 m2 m3 )
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    let (j1, j2, j3, m1, m2, m3) = (j1.0, j2.0, j3.0, m1.0, m2.0, m3.0);
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) {
        return 0.0;
    }
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if m.abs() > j || (j + m) % 2 != 0 {
            return 0.0;
        }
    }
    let pre = sign(j1 - j2 - m3)
        * delta(j1, j2, j3)
        * (fact2(j1 + m1) * fact2(j1 - m1) * fact2(j2 + m2) * fact2(j2 - m2) * fact2(j3 + m3) * fact2(j3 - m3)).sqrt();
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    let mut k = kmin;
    while k <= kmax {
        sum += sign(k)
            / (fact2(k)
                * fact2(j1 + j2 - j3 - k)
                * fact2(j1 - m1 - k)
                * fact2(j2 + m2 - k)
                * fact2(j3 - j2 + m1 + k)
                * fact2(j3 - j1 - m2 + k));
        k += 2;
    }
    pre * sum
}

/// { j1 j2 j3 ; j4 j5 j6 }
pub fn wigner_6j(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> f64 {
    let (a, b, c, d, e, f) = (j1.0, j2.0, j3.0, j4.0, j5.0, j6.0);
    if !(triangle(a, b, c) && triangle(a, e, f) && triangle(d, b, f) && triangle(d, e, c)) {
        return 0.0;
    }
    let pre = delta(a, b, c) * delta(a, e, f) * delta(d, b, f) * delta(d, e, c);
    let tmin = (a + b + c).max(a + e + f).max(d + b + f).max(d + e + c);
    let tmax = (a + b + d + e).min(b + c + e + f).min(c + a + f + d);
    let mut sum = 0.0;
    let mut t = tmin;
    while t <= tmax {
        sum += sign(t) * fact2(t + 2)
            / (fact2(t - a - b - c)
                * fact2(t - a - e - f)
                * fact2(t - d - b - f)
                * fact2(t - d - e - c)
                * fact2(a + b + d + e - t)
                * fact2(b + c + e + f - t)
                * fact2(c + a + f + d - t));
        t += 2;
    }
    pre * sum
}

/// { j1 j2 j3 ; j4 j5 j6 ; j7 j8 j9 }
#[allow(clippy::too_many_arguments)]
pub fn wigner_9j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
    j7: HalfInt,
    j8: HalfInt,
    j9: HalfInt,
) -> f64 {
    let lo = (j1.0 - j9.0).abs().max((j4.0 - j8.0).abs()).max((j2.0 - j6.0).abs());
    let hi = (j1.0 + j9.0).min(j4.0 + j8.0).min(j2.0 + j6.0);
    let mut sum = 0.0;
    let mut x = lo;
    while x <= hi {
        let hx = HalfInt(x);
        sum += sign(2 * x)
            * (x + 1) as f64
            * wigner_6j(j1, j4, j7, j8, j9, hx)
            * wigner_6j(j2, j5, j8, j4, hx, j6)
            * wigner_6j(j3, j6, j9, hx, j1, j2);
        x += 2;
    }
    sum
}

/// ⟨j1 m1 j2 m2 | J M⟩
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
    sign(j1.0 - j2.0 + m.0) * ((j.0 + 1) as f64).sqrt() * wigner_3j(j1, j2, j, m1, m2, -m)
}

/// ⟨j‖J‖j⟩ = √(j(j+1)(2j+1))
pub fn reduced_angular_momentum(j: HalfInt) -> f64 {
    (j.casimir() * j.multiplicity() as f64).sqrt()
}

/// ⟨N‖C^k‖N′⟩ = (−1)^N √((2N+1)(2N′+1)) (N k N′; 0 0 0)
pub fn reduced_c_tensor(n: HalfInt, k: HalfInt, n2: HalfInt) -> f64 {
    sign(n.0)
        * ((n.multiplicity() * n2.multiplicity()) as f64).sqrt()
        * wigner_3j(n, k, n2, HalfInt::ZERO, HalfInt::ZERO, HalfInt::ZERO)
}

/// (−1)^{x} for an integer-valued half-integer combination.
pub fn phase(x: HalfInt) -> f64 {
    sign(x.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn half_int_parsing() {
        assert_eq!(HalfInt::new(2.5).unwrap().twice(), 5);
        assert!(HalfInt::new(0.3).is_err());
        assert_eq!(HalfInt::new(2.5).unwrap().to_string(), "5/2");
        assert_eq!(HalfInt::int(3).to_string(), "3");
        let v: Vec<_> = HalfInt::couple(h(1), h(5)).map(|x| x.twice()).collect();
        assert_eq!(v, vec![4, 6]);
    }

    #[test]
    fn known_3j() {
        assert_relative_eq!(wigner_3j(h(2), h(2), h(0), h(0), h(0), h(0)), -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(wigner_3j(h(2), h(2), h(4), h(0), h(0), h(0)), (2.0f64 / 15.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(wigner_3j(h(1), h(1), h(2), h(1), h(-1), h(0)), 1.0 / 6f64.sqrt(), epsilon = 1e-15);
        assert_eq!(wigner_3j(h(2), h(2), h(2), h(0), h(0), h(0)), 0.0);
        assert_eq!(wigner_3j(h(2), h(2), h(6), h(0), h(0), h(0)), 0.0);
    }

    #[test]
    fn known_6j() {
        assert_relative_eq!(wigner_6j(h(2), h(2), h(2), h(2), h(2), h(2)), 1.0 / 6.0, epsilon = 1e-15);
        // {a b c; b a 0} = (−1)^{a+b+c}/√((2a+1)(2b+1))
        let v = wigner_6j(h(5), h(1), h(4), h(1), h(5), h(0));
        assert_relative_eq!(v, -1.0 / (6.0f64 * 2.0).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn nine_j_with_zero_reduces_to_6j() {
        // {a b c; d e c; g g 0} = (−1)^{b+c+d+g} {a b c; e d g} / √((2c+1)(2g+1))
        let (a, b, c, d, e, g) = (h(2), h(1), h(3), h(1), h(2), h(1));
        let lhs = wigner_9j(a, b, c, d, e, c, g, g, h(0));
        let rhs = phase(b + c + d + g) * wigner_6j(a, b, c, e, d, g) / (4.0f64 * 2.0).sqrt();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn three_j_orthonormal(j1 in 0i32..7, j2 in 0i32..7) {
            for j3 in HalfInt::couple(h(j1), h(j2)) {
                for j3p in HalfInt::couple(h(j1), h(j2)) {
                    for m3 in j3.projections() {
                        let mut s = 0.0;
                        for m1 in h(j1).projections() {
                            for m2 in h(j2).projections() {
                                s += wigner_3j(h(j1), h(j2), j3, m1, m2, m3)
                                    * wigner_3j(h(j1), h(j2), j3p, m1, m2, m3);
                            }
                        }
                        let want = if j3 == j3p && j3p.twice() >= m3.twice().abs() {
                            1.0 / j3.multiplicity() as f64
                        } else { 0.0 };
                        prop_assert!((s - want).abs() < 1e-12);
                    }
                }
            }
        }

        #[test]
        fn six_j_orthogonal(a in 0i32..6, b in 0i32..6, c in 0i32..6, d in 0i32..6) {
            // Σ_x (2x+1)(2p+1) {a b x; c d p}{a b x; c d q} = δ_pq
            let (a, b, c, d) = (h(a), h(b), h(c), h(d));
            let ps: Vec<_> = HalfInt::couple(a, d).filter(|p| triangle(c.0, b.0, p.0)).collect();
            for &p in &ps {
                for &q in &ps {
                    let mut s = 0.0;
                    for x in HalfInt::couple(a, b) {
                        s += (x.multiplicity() * p.multiplicity()) as f64
                            * wigner_6j(a, b, x, c, d, p) * wigner_6j(a, b, x, c, d, q);
                    }
                    let has_x = HalfInt::couple(a, b).any(|x| triangle(c.0, d.0, x.0));
                    let want = if p == q && has_x { 1.0 } else { 0.0 };
                    prop_assert!((s - want).abs() < 1e-10, "{s} {want}");
                }
            }
        }

        #[test]
        fn six_j_symmetric_under_column_swap(a in 0i32..6, b in 0i32..6, c in 0i32..6, d in 0i32..6, e in 0i32..6, f in 0i32..6) {
            let v = wigner_6j(h(a), h(b), h(c), h(d), h(e), h(f));
            let w = wigner_6j(h(b), h(a), h(c), h(e), h(d), h(f));
            let x = wigner_6j(h(d), h(e), h(c), h(a), h(b), h(f));
            prop_assert!((v - w).abs() < 1e-13 && (v - x).abs() < 1e-13);
        }
    }
}
