//! Exact scalar arithmetic: arbitrary-precision integers and rationals,
//! canonical `"p/q"` text form, and exact n-th roots of rationals.

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn rat_from_int(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// Canonical text form `"p/q"` with `q > 0` and `gcd(p, q) = 1`.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = num
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational numerator in {s:?}")))?;
    let d: Int = den
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// `r^e` for any integer exponent; negative exponents require `r != 0`.
pub fn rat_pow(r: &Rat, e: i64) -> Result<Rat> {
    if e == 0 {
        return Ok(Rat::one());
    }
    let (base, mut exp) = if e < 0 {
        if r.is_zero() {
            return Err(Error::Domain("zero raised to a negative power".into()));
        }
        (r.recip(), e.unsigned_abs())
    } else {
        (r.clone(), e as u64)
    };
    let mut acc = Rat::one();
    let mut sq = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = &sq * &sq;
        }
    }
    Ok(acc)
}

/// Exact k-th root of a rational, or a field-extension error when the root
/// does not exist in the rationals.
pub fn rational_nth_root(w: &Rat, k: u64) -> Result<Rat> {
    if k == 0 {
        return Err(Error::Domain("zeroth root".into()));
    }
    if k == 1 {
        return Ok(w.clone());
    }
    if w.is_zero() {
        return Ok(Rat::zero());
    }
    let negative = w.is_negative();
    if negative && k % 2 == 0 {
        return Err(Error::FieldExtension(format!(
            "no rational {k}-th root of negative {}",
            format_rat(w)
        )));
    }
    let num = w.numer().abs();
    let den = w.denom().clone();
    let rn = num.nth_root(k as u32);
    let rd = den.nth_root(k as u32);
    if num::pow::pow(rn.clone(), k as usize) != num || num::pow::pow(rd.clone(), k as usize) != den
    {
        return Err(Error::FieldExtension(format!(
            "no rational {k}-th root of {}",
            format_rat(w)
        )));
    }
    let signed = if negative { -rn } else { rn };
    Ok(Rat::new(signed, rd))
}

pub fn factorial(k: usize) -> Int {
    let mut acc = Int::one();
    for i in 2..=k {
        acc *= Int::from(i);
    }
    acc
}

/// Integer sign as -1, 0, or 1.
pub fn sign_of(n: &Int) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let r = parse_rat("-6/4").unwrap();
        assert_eq!(format_rat(&r), "-3/2");
        assert_eq!(parse_rat("7").unwrap(), rat_int(7));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let r = rat(2, 3);
        assert_eq!(rat_pow(&r, -2).unwrap(), rat(9, 4));
        assert_eq!(rat_pow(&r, 0).unwrap(), Rat::one());
        assert!(rat_pow(&Rat::zero(), -1).is_err());
    }

    #[test]
    fn nth_roots_exact_or_error() {
        assert_eq!(rational_nth_root(&rat(8, 27), 3).unwrap(), rat(2, 3));
        assert_eq!(rational_nth_root(&rat(-8, 27), 3).unwrap(), rat(-2, 3));
        assert_eq!(rational_nth_root(&rat(9, 4), 2).unwrap(), rat(3, 2));
        assert!(matches!(
            rational_nth_root(&rat(2, 1), 2),
            Err(Error::FieldExtension(_))
        ));
        assert!(matches!(
            rational_nth_root(&rat(-4, 1), 2),
            Err(Error::FieldExtension(_))
        ));
    }
}
