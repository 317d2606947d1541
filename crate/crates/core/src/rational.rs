//! Exact rational scalars and their text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The scalar type used for every mass, rate and interval endpoint.
pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `p/q`, `-p/q` or an integer.
pub fn parse(text: &str) -> Result<Q> {
    let text = text.trim();
    let bad = || Error::Parse {
        line: 0,
        message: format!("invalid rational `{text}`"),
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() || d.is_negative() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = text.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Lowest terms, `p/q` or a bare integer; never a decimal.
pub fn format(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn max(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn min(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn sum<'a>(items: impl IntoIterator<Item = &'a Q>) -> Q {
    items.into_iter().fold(Q::zero(), |acc, x| acc + x)
}

pub fn to_f64(q: &Q) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
