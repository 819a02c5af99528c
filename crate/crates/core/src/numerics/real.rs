use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Round;
use rug::ops::PowAssign;
use rug::Float;

/// Extended-precision real number.
///
/// Binary operations produce a result at the larger of the operand
/// precisions; compound assignment keeps the left operand's precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Float);

impl From<Float> for Real {
    fn from(f: Float) -> Self {
        Real(f)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(24))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_decimal(p.max(1))),
            None => f.write_str(&self.to_decimal(self.decimal_digits())),
        }
    }
}

impl Real {
    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    fn decimal_digits(&self) -> usize {
        let bits = self.prec().saturating_sub(super::precision::GUARD_BITS).max(24);
        (bits as f64 / std::f64::consts::LOG2_10).floor() as usize
    }

    /// A value of the same precision.
    pub fn like(&self, x: f64) -> Real {
        Real(Float::with_val(self.prec(), x))
    }

    pub fn zero_like(&self) -> Real {
        Real(Float::new(self.prec()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    pub fn abs(&self) -> Real {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.clone().sqrt())
    }

    pub fn cos(&self) -> Real {
        Real(self.0.clone().cos())
    }

    pub fn sin(&self) -> Real {
        Real(self.0.clone().sin())
    }

    pub fn ln(&self) -> Real {
        Real(self.0.clone().ln())
    }

    pub fn log10(&self) -> Real {
        Real(self.0.clone().log10())
    }

    pub fn recip(&self) -> Real {
        Real(self.0.clone().recip())
    }

    pub fn square(&self) -> Real {
        Real(self.0.clone().square())
    }

    pub fn powi(&self, e: i32) -> Real {
        let mut f = self.0.clone();
        f.pow_assign(e);
        Real(f)
    }

    pub fn hypot(&self, other: &Real) -> Real {
        let p = self.prec().max(other.prec());
        Real(Float::with_val(p, self.0.hypot_ref(&other.0)))
    }

    pub fn max<'a>(&'a self, other: &'a Real) -> &'a Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min<'a>(&'a self, other: &'a Real) -> &'a Real {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Total order on non-NaN values.
    pub fn total_cmp(&self, other: &Real) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// Scientific decimal string with `digits` significant digits, e.g.
    /// `-2.502907875e0`.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return if digits > 1 {
                format!("0.{}e0", "0".repeat(digits - 1))
            } else {
                "0e0".to_string()
            };
        }
        if !self.0.is_finite() {
            return self.0.to_string();
        }
        let s = self.0.to_string_radix_round(10, Some(digits), Round::Nearest);
        normalize_exponent(&s)
    }
}

/// Rewrites rug's `1.25e-3` / `1.25` spelling into a fixed `m.mmmeE` form.
fn normalize_exponent(s: &str) -> String {
    let (mantissa, exp) = match s.find('e') {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let (sign, digits_part) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let dot = digits_part.find('.').unwrap_or(digits_part.len());
    let int_part = &digits_part[..dot];
    let frac_part = if dot < digits_part.len() { &digits_part[dot + 1..] } else { "" };
    let all: String = format!("{int_part}{frac_part}");
    let lead = all.find(|c: char| c != '0').unwrap_or(0);
    let significant = &all[lead..];
    let exp10 = exp + int_part.len() as i64 - 1 - lead as i64;
    let (first, rest) = significant.split_at(1.min(significant.len()));
    if rest.is_empty() {
        format!("{sign}{first}e{exp10}")
    } else {
        format!("{sign}{first}.{rest}e{exp10}")
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl<'a, 'b> $tr<&'b Real> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: &'b Real) -> Real {
                let p = self.0.prec().max(rhs.0.prec());
                Real(Float::with_val(p, $tr::$m(&self.0, &rhs.0)))
            }
        }
        impl<'b> $tr<&'b Real> for Real {
            type Output = Real;
            fn $m(mut self, rhs: &'b Real) -> Real {
                if rhs.0.prec() > self.0.prec() {
                    return $tr::$m(&self, rhs);
                }
                $atr::$am(&mut self.0, &rhs.0);
                self
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                $tr::$m(self, &rhs)
            }
        }
        impl<'a> $tr<Real> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                $tr::$m(self, &rhs)
            }
        }
        impl<'b> $atr<&'b Real> for Real {
            fn $am(&mut self, rhs: &'b Real) {
                $atr::$am(&mut self.0, &rhs.0);
            }
        }
        impl $atr<Real> for Real {
            fn $am(&mut self, rhs: Real) {
                $atr::$am(&mut self.0, &rhs.0);
            }
        }
        real_binop!(@prim $tr, $m, $atr, $am, f64);
        real_binop!(@prim $tr, $m, $atr, $am, i32);
    };
    (@prim $tr:ident, $m:ident, $atr:ident, $am:ident, $t:ty) => {
        impl $tr<$t> for Real {
            type Output = Real;
            fn $m(mut self, rhs: $t) -> Real {
                $atr::$am(&mut self.0, rhs);
                self
            }
        }
        impl<'a> $tr<$t> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: $t) -> Real {
                Real(Float::with_val(self.0.prec(), $tr::$m(&self.0, rhs)))
            }
        }
        impl $atr<$t> for Real {
            fn $am(&mut self, rhs: $t) {
                $atr::$am(&mut self.0, rhs);
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign);
real_binop!(Sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, MulAssign, mul_assign);
real_binop!(Div, div, DivAssign, div_assign);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl<'a> Neg for &'a Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.0.prec(), -&self.0))
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

/// `max_i |v_i|`; zero for an empty slice is returned at precision `prec`.
pub fn norm_inf(v: &[Real]) -> Real {
    let mut best = match v.first() {
        Some(x) => x.zero_like(),
        None => return Real(Float::new(64)),
    };
    for x in v {
        let a = x.abs();
        if a > best {
            best = a;
        }
    }
    best
}

/// `sum_i a_i b_i` accumulated left to right.
pub fn dot(a: &[Real], b: &[Real]) -> Real {
    let mut acc = a[0].zero_like();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}
