//! Exact rational scalars used by the combinatorial layers.
//!
//! All hull predicates, cone tests and spine positions are computed in
//! `BigRational`; floating point only enters once geometry is handed to the
//! numeric layers.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::ToPrimitive;

pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn rat_to_f64(v: &Rat) -> f64 {
    // BigRational::to_f64 only fails on zero denominators, which `Rat` forbids.
    v.to_f64().unwrap_or(f64::NAN)
}

/// Renders `p/q` in lowest terms; integers render without the denominator.
pub fn rat_to_string(v: &Rat) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `"p"` or `"p/q"`.
pub fn rat_from_str(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator in {s:?}"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational denominator in {s:?}"))?;
    if d == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for (n, d) in [(0, 1), (7, 1), (-3, 4), (22, 7), (-100, 9)] {
            let v = rat(n, d);
            assert_eq!(rat_from_str(&rat_to_string(&v)).unwrap(), v);
        }
    }

    #[test]
    fn parse_rejects_zero_denominator() {
        assert!(rat_from_str("1/0").is_err());
    }

    #[test]
    fn parse_accepts_whitespace_and_integers() {
        assert_eq!(rat_from_str(" 5 ").unwrap(), rat_int(5));
        assert_eq!(rat_from_str("-9/12").unwrap(), rat(-3, 4));
    }
}
