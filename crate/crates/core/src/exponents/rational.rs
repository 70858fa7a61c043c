use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{KlsError, Result};

/// Exact rational used for all exponent algebra.
pub type Q = Ratio<i128>;

pub fn q(num: i128, den: i128) -> Q {
    Q::new(num, den)
}

pub fn to_f64(x: Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Renders as `p/q` (always with a denominator, e.g. `2/1`).
pub fn render(x: Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q`, an integer, or a finite decimal such as `1.75`.
pub fn parse(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || KlsError::InvalidParameter(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let w: i128 = if whole.is_empty() || whole == "-" { 0 } else { whole.parse().map_err(|_| bad())? };
        let den = 10i128.pow(frac.len() as u32);
        let f: i128 = frac.parse().map_err(|_| bad())?;
        let mag = w.abs() * den + f;
        return Ok(Q::new(if negative { -mag } else { mag }, den));
    }
    t.parse::<i128>().map(Q::from_integer).map_err(|_| bad())
}

pub fn is_positive(x: Q) -> bool {
    x.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/2").unwrap(), q(3, 2));
        assert_eq!(parse("2").unwrap(), q(2, 1));
        assert_eq!(parse("1.75").unwrap(), q(7, 4));
        assert_eq!(parse("-0.5").unwrap(), q(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert_eq!(render(q(6, 4)), "3/2");
        assert_eq!(render(q(2, 1)), "2/1");
    }
}
