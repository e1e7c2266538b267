//! Exact rational scalars and their textual form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational used for every value and length.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("malformed number {0:?} (expected an integer, a finite decimal, or p/q)")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRationalError::Malformed(whole.to_string()))
}

/// Parses `"7"`, `"-2"`, `"0.25"`, `".5"` or `"3/8"` without any rounding.
///
/// Repeating decimals have no finite notation here; write them as `p/q`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((p, q)) = s.split_once('/') {
        let num = parse_int(p.trim(), s)?;
        let den = parse_int(q.trim(), s)?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.strip_prefix('-').unwrap_or(whole);
        if (whole_digits.is_empty() && frac.is_empty())
            || !whole_digits.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(ParseRationalError::Malformed(s.to_string()));
        }
        let mut digits = String::with_capacity(whole_digits.len() + frac.len());
        digits.push_str(whole_digits);
        digits.push_str(frac);
        let mut num: BigInt = digits
            .parse()
            .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    Ok(Rational::from_integer(parse_int(s, s)?))
}

/// Canonical text: `"p"` for integers, `"p/q"` in lowest terms otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("1.5").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-2.50").unwrap(), ratio(-5, 2));
        assert_eq!(parse_rational("3.").unwrap(), int(3));
    }

    #[test]
    fn fractions_reduce() {
        assert_eq!(parse_rational("2/6").unwrap(), ratio(1, 3));
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_rational(""), Err(ParseRationalError::Empty));
        assert!(matches!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        for bad in ["abc", "1e3", "0.3.3", "1/2/3", ".", "--1", "+1", "1/"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn huge_values_survive() {
        let r = parse_rational("123456789012345678901234567890/7").unwrap();
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}
