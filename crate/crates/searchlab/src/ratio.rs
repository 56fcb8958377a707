//! Exact rational arithmetic helpers.
//!
//! All probabilities over uniform inputs are rationals with denominators
//! bounded by small powers of two times set sizes; `i128` components are ample
//! at the instance sizes this crate supports.

use crate::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

pub type Q = Ratio<i128>;

pub fn q(num: i128, den: i128) -> Q {
    Ratio::new(num, den)
}

/// 2^(-e) as an exact rational.
pub fn pow2_neg(e: u32) -> Q {
    Ratio::new(1, 1i128 << e)
}

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Renders a rational as `"num/denom"` (reduced), the report wire form.
pub fn q_to_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"`, an integer, or a finite decimal into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: i128 = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: i128 = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 18 {
            return Err(Error::Parse(format!("too many decimal digits in {s:?}")));
        }
        let neg = int.starts_with('-');
        let int: i128 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse()
                .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?
        };
        let frac: i128 = if frac.is_empty() {
            0
        } else {
            frac.parse()
                .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?
        };
        let scale = 10i128.pow(digits);
        let mag = int.abs() * scale + frac;
        let signed = if neg { -mag } else { mag };
        return Ok(Ratio::new(signed, scale));
    }
    let num: i128 = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Ratio::from_integer(num))
}

/// log2 of a positive rational, in f64.
pub fn log2_q(x: &Q) -> f64 {
    assert!(*x > Q::zero(), "log2 of nonpositive rational");
    (*x.numer() as f64).log2() - (*x.denom() as f64).log2()
}
