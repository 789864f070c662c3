//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational; every computation in this crate is exact.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// `2^-k`.
pub fn dyadic(k: u32) -> Scalar {
    Scalar::new(BigInt::one(), BigInt::one() << k as usize)
}

pub fn half(x: &Scalar) -> Scalar {
    x / int(2)
}

pub fn min(a: &Scalar, b: &Scalar) -> Scalar {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Scalar, b: &Scalar) -> Scalar {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn is_positive(x: &Scalar) -> bool {
    x.is_positive()
}

pub fn is_zero(x: &Scalar) -> bool {
    x.is_zero()
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format(x: &Scalar) -> String {
    x.to_string()
}

/// Parses `p` or `p/q` with an optional leading minus sign.
pub fn parse(text: &str) -> Option<Scalar> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let num: BigInt = parse_int(num, true)?;
    let den: BigInt = match den {
        Some(d) => parse_int(d, false)?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(Scalar::new(num, den))
}

fn parse_int(text: &str, signed: bool) -> Option<BigInt> {
    let digits = match text.strip_prefix('-') {
        Some(rest) if signed => rest,
        Some(_) => return None,
        None => text,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("-1/2"), Some(ratio(-1, 2)));
        assert_eq!(parse("4/2"), Some(int(2)));
        assert_eq!(format(&ratio(6, -4)), "-3/2");
        assert_eq!(format(&int(7)), "7");
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("1/-2"), None);
        assert_eq!(parse("1.5"), None);
        assert_eq!(parse(""), None);
    }

    #[test]
    fn dyadic_powers() {
        assert_eq!(dyadic(0), int(1));
        assert_eq!(dyadic(10), ratio(1, 1024));
        assert_eq!(dyadic(20) * int(1 << 20), int(1));
    }
}
