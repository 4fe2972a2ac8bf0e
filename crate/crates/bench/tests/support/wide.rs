//! 256-bit binary floating point as a [`Field`].
//!
//! Rounding stays near 1e-77 relative, far below the quantities checked in
//! the acceptance target, while avoiding the gcd cost of exact rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Rem, Sub};

use acd_core::{BigRational, Field};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

pub const PRECISION: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct Wide(FBig<HalfEven>);

impl Wide {
    fn wrap(v: FBig<HalfEven>) -> Self {
        Wide(v.with_precision(PRECISION).value())
    }

    /// Nearest value to a rational whose parts fit in `i64`.
    pub fn from_rational(v: &BigRational) -> Self {
        let num = v.numer().to_i64().expect("numerator fits in i64");
        let den = v.denom().to_i64().expect("denominator fits in i64");
        Wide::from_i64(num).unwrap() / Wide::from_i64(den).unwrap()
    }
}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64_lossy())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Wide {
            type Output = Wide;
            fn $m(self, rhs: Wide) -> Wide {
                Wide(self.0.$m(rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Rem for Wide {
    type Output = Wide;
    fn rem(self, rhs: Wide) -> Wide {
        let q = (self.0.clone() / rhs.0.clone()).trunc();
        Wide(self.0 - q * rhs.0)
    }
}

impl Zero for Wide {
    fn zero() -> Self {
        Wide::wrap(FBig::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0 == FBig::<HalfEven>::ZERO
    }
}

impl One for Wide {
    fn one() -> Self {
        Wide::wrap(FBig::ONE)
    }
}

impl Num for Wide {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("radix {radix} is not supported"));
        }
        s.parse::<f64>().map(Wide::from_f64_lossy).map_err(|e| e.to_string())
    }
}

impl FromPrimitive for Wide {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Wide::wrap(FBig::from(n)))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Wide::wrap(FBig::from(n)))
    }
    fn from_f64(v: f64) -> Option<Self> {
        FBig::try_from(v).ok().map(Wide::wrap)
    }
}

impl ToPrimitive for Wide {
    fn to_i64(&self) -> Option<i64> {
        self.to_f64().map(|v| v as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_f64().map(|v| v as u64)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0.to_f64().value())
    }
}

impl Field for Wide {
    /// Far below any ratio met in the checks, far above the rounding level.
    fn singular_threshold() -> Self {
        Wide::from_f64_lossy(1e-50)
    }
}

