//! Angles carried either as exact rational multiples of π or as plain radians.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedSub, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Radius of the band below 2π that is folded back onto 0.
pub const SEAM_TOL: f64 = 1e-9;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug)]
pub enum Angle {
    /// `r·π` for a rational `r`.
    Exact(Ratio<i64>),
    Float(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::Exact(Ratio::new_raw(0, 1));

    /// `num/den · π`. Panics if `den == 0`.
    pub fn pi_frac(num: i64, den: i64) -> Angle {
        Angle::Exact(Ratio::new(num, den))
    }

    pub fn pi_times(k: i64) -> Angle {
        Angle::Exact(Ratio::from_integer(k))
    }

    pub fn radians(rad: f64) -> Angle {
        Angle::Float(rad)
    }

    pub fn to_radians(self) -> f64 {
        match self {
            Angle::Exact(r) => ratio_to_f64(r) * PI,
            Angle::Float(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Angle::Exact(_))
    }

    /// The rational multiple of π, when exact.
    pub fn over_pi(self) -> Option<Ratio<i64>> {
        match self {
            Angle::Exact(r) => Some(r),
            Angle::Float(_) => None,
        }
    }

    /// `self − level·π` in radians. Exact inputs give an exactly signed result.
    pub fn residual(self, level_over_pi: i64) -> f64 {
        (self - Angle::pi_times(level_over_pi)).to_radians()
    }

    pub fn scale(self, k: i64) -> Angle {
        match self {
            Angle::Exact(r) => match r.numer().checked_mul(k) {
                Some(n) => Angle::Exact(Ratio::new(n, *r.denom())),
                None => Angle::Float(self.to_radians() * k as f64),
            },
            Angle::Float(x) => Angle::Float(x * k as f64),
        }
    }

    /// Reduce into `[0, 2π)`, folding values within `SEAM_TOL` below 2π onto 0.
    pub fn reduce(self) -> Angle {
        match self {
            Angle::Exact(r) => {
                let two = Ratio::from_integer(2);
                let q = (r / two).floor();
                Angle::Exact(r - q * two)
            }
            Angle::Float(x) => {
                let mut y = x.rem_euclid(TWO_PI);
                if y >= TWO_PI - SEAM_TOL {
                    y = 0.0;
                }
                Angle::Float(y)
            }
        }
    }

    /// Total order on the represented real numbers.
    pub fn cmp_value(self, other: Angle) -> Ordering {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => a.cmp(&b),
            _ => {
                let d = (self - other).to_radians();
                d.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
            }
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Angle::Exact(r) => r.is_zero(),
            Angle::Float(x) => x == 0.0,
        }
    }
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    r.to_f64().unwrap_or(*r.numer() as f64 / *r.denom() as f64)
}

fn exact_op(a: Ratio<i64>, b: Ratio<i64>, add: bool) -> Angle {
    let res = if add { a.checked_add(&b) } else { a.checked_sub(&b) };
    match res {
        Some(r) => Angle::Exact(r),
        None => {
            let (x, y) = (ratio_to_f64(a) * PI, ratio_to_f64(b) * PI);
            Angle::Float(if add { x + y } else { x - y })
        }
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::Exact(a), Angle::Exact(b)) => exact_op(a, b, true),
            _ => Angle::Float(self.to_radians() + rhs.to_radians()),
        }
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::Exact(a), Angle::Exact(b)) => exact_op(a, b, false),
            _ => Angle::Float(self.to_radians() - rhs.to_radians()),
        }
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        match self {
            Angle::Exact(r) => Angle::Exact(-r),
            Angle::Float(x) => Angle::Float(-x),
        }
    }
}

impl std::iter::Sum for Angle {
    fn sum<I: Iterator<Item = Angle>>(iter: I) -> Angle {
        iter.fold(Angle::ZERO, |acc, a| acc + a)
    }
}

/// Value equality: exact against exact compares rationals, otherwise radians.
impl PartialEq for Angle {
    fn eq(&self, other: &Angle) -> bool {
        self.cmp_value(*other) == Ordering::Equal
    }
}

impl From<f64> for Angle {
    fn from(x: f64) -> Angle {
        Angle::Float(x)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Exact(r) => {
                let (n, d) = (*r.numer(), *r.denom());
                match (n, d) {
                    (0, _) => write!(f, "0"),
                    (1, 1) => write!(f, "pi"),
                    (-1, 1) => write!(f, "-pi"),
                    (n, 1) => write!(f, "{n}pi"),
                    (1, d) => write!(f, "pi/{d}"),
                    (-1, d) => write!(f, "-pi/{d}"),
                    (n, d) => write!(f, "{n}pi/{d}"),
                }
            }
            Angle::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_radians())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Angle, D::Error> {
        f64::deserialize(d).map(Angle::Float)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_reduction() {
        assert_eq!(Angle::pi_frac(7, 2).reduce(), Angle::pi_frac(3, 2));
        assert_eq!(Angle::pi_times(2).reduce(), Angle::ZERO);
        assert_eq!(Angle::pi_frac(-1, 3).reduce(), Angle::pi_frac(5, 3));
    }

    #[test]
    fn float_seam_folds_to_zero() {
        let a = Angle::radians(TWO_PI - 1e-12).reduce();
        assert_eq!(a.to_radians(), 0.0);
        let b = Angle::radians(-1e-12).reduce();
        assert_eq!(b.to_radians(), 0.0);
    }

    #[test]
    fn residual_sign_is_exact() {
        let x = Angle::pi_frac(1, 3) + Angle::pi_frac(2, 3);
        assert_eq!(x.residual(1), 0.0);
        assert!(Angle::pi_frac(1000001, 1000000).residual(1) > 0.0);
    }

    #[test]
    fn overflow_falls_back_to_float() {
        let big = Angle::pi_frac(1, i64::MAX - 1);
        let other = Angle::pi_frac(1, i64::MAX - 2);
        let s = big + other;
        assert!(!s.is_exact());
    }

    #[test]
    fn display_round_trip_forms() {
        assert_eq!(Angle::pi_frac(2, 3).to_string(), "2pi/3");
        assert_eq!(Angle::pi_times(1).to_string(), "pi");
        assert_eq!(Angle::ZERO.to_string(), "0");
    }
}
