//! Exact coefficient fields: the rationals and the Gaussian rationals.
//!
//! Both implement [`Scalar`], which adds the involution (complex conjugation)
//! and a few conversions on top of the `num-traits` field operations.

use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;
pub type Gauss = Complex<BigRational>;

/// A field of characteristic zero with an involution.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + std::ops::Neg<Output = Self> + Send + Sync + 'static
{
    fn conj(&self) -> Self;
    fn from_rat(r: Rat) -> Self;
    fn re(&self) -> Rat;
    fn im(&self) -> Rat;

    fn from_i64(v: i64) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(v)))
    }

    fn is_real(&self) -> bool {
        self.im().is_zero()
    }

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    /// `self * conj(self)`, always a nonnegative rational.
    fn norm_sqr(&self) -> Rat {
        let r = self.re();
        let i = self.im();
        &r * &r + &i * &i
    }

    /// Lift into the Gaussian rationals.
    fn to_gauss(&self) -> Gauss {
        Gauss::new(self.re(), self.im())
    }

    /// Exact square root in the field, if one exists.
    fn sqrt(&self) -> Option<Self>;

    /// The imaginary unit, when the field contains one.
    fn imag_unit() -> Option<Self>;

    /// Some `c` with `c* c = q`, found by bounded search.
    fn from_norm(q: &Rat) -> Option<Self>;
}

impl Scalar for Rat {
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn re(&self) -> Rat {
        self.clone()
    }
    fn im(&self) -> Rat {
        Rat::zero()
    }
    fn sqrt(&self) -> Option<Self> {
        rat_sqrt(self)
    }
    fn imag_unit() -> Option<Self> {
        None
    }
    fn from_norm(q: &Rat) -> Option<Self> {
        rat_sqrt(q)
    }
}

impl Scalar for Gauss {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn from_rat(r: Rat) -> Self {
        Gauss::new(r, Rat::zero())
    }
    fn re(&self) -> Rat {
        self.re.clone()
    }
    fn im(&self) -> Rat {
        self.im.clone()
    }
    fn sqrt(&self) -> Option<Self> {
        gauss_sqrt(self)
    }
    fn imag_unit() -> Option<Self> {
        Some(Gauss::new(Rat::zero(), Rat::one()))
    }
    fn from_norm(q: &Rat) -> Option<Self> {
        norm_preimage(q).ok()
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn ri(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn gauss(re: Rat, im: Rat) -> Gauss {
    Gauss::new(re, im)
}

pub fn gi(re: i64, im: i64) -> Gauss {
    Gauss::new(ri(re), ri(im))
}

/// Project a Gaussian rational to the rationals, failing if it is not real.
pub fn real_part_checked(z: &Gauss) -> Result<Rat> {
    if z.im.is_zero() {
        Ok(z.re.clone())
    } else {
        Err(Error::NonRealInput)
    }
}

/// Exact integer square root, if `n` is a perfect square.
pub fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact square root of a nonnegative rational, if it exists.
pub fn rat_sqrt(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let n = int_sqrt_exact(q.numer())?;
    let d = int_sqrt_exact(q.denom())?;
    Some(Rat::new(n, d))
}

/// Exact square root in Q(i), if it exists. Returns the root with positive
/// real part, or positive imaginary part when the real part vanishes.
pub fn gauss_sqrt(z: &Gauss) -> Option<Gauss> {
    if z.is_zero() {
        return Some(Gauss::zero());
    }
    let modulus = rat_sqrt(&z.norm_sqr())?;
    let two = ri(2);
    let x2 = (&modulus + &z.re) / &two;
    let y2 = (&modulus - &z.re) / &two;
    let x = rat_sqrt(&x2)?;
    let mut y = rat_sqrt(&y2)?;
    if x.is_zero() {
        return Some(Gauss::new(x, y));
    }
    // 2xy = im
    if (&x * &y * &two) != z.im {
        y = -y;
    }
    let cand = Gauss::new(x, y);
    if &cand * &cand == *z {
        Some(cand)
    } else {
        None
    }
}

/// Find `c` in Q(i) with `|c|^2 = q` for a positive rational `q`, searching
/// small representations `p*q_den = x^2 + y^2` of the integer part.
pub fn norm_preimage(q: &Rat) -> Result<Gauss> {
    if q.is_negative() {
        return Err(Error::ConstantNotNorm(q.to_string()));
    }
    if let Some(r) = rat_sqrt(q) {
        return Ok(Gauss::from_rat(r));
    }
    // q = a/b ; a*b = x^2 + y^2  =>  q = (x^2+y^2)/b^2
    let n: BigInt = q.numer() * q.denom();
    let limit = n.sqrt();
    let mut x = BigInt::zero();
    // sum of two squares search; the corpus only produces small constants
    let cap = BigInt::from(2_000_000u64);
    while x <= limit && x <= cap {
        let rest = &n - &x * &x;
        if let Some(y) = int_sqrt_exact(&rest) {
            let b = Rat::from_integer(q.denom().clone());
            return Ok(Gauss::new(
                Rat::from_integer(x) / &b,
                Rat::from_integer(y) / &b,
            ));
        }
        x += 1;
    }
    Err(Error::ConstantNotNorm(q.to_string()))
}

/// Total order used for deterministic tie-breaking: real part, then imaginary.
pub fn gauss_cmp(a: &Gauss, b: &Gauss) -> std::cmp::Ordering {
    a.re.cmp(&b.re).then(a.im.cmp(&b.im))
}

/// Decimal string form `p/q` (or `p` when the denominator is one).
pub fn fmt_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Schema(format!("bad rational literal {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    } else if let Some((ip, fp)) = s.split_once('.') {
        // plain decimal, exact
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rat::new(n, d);
        Ok(if neg { -v } else { v })
    } else {
        Ok(Rat::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
    }
}

/// Human-readable form of a Gaussian rational, e.g. `3/2-2i`.
pub struct GaussDisplay<'a>(pub &'a Gauss);

impl Display for GaussDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.0;
        if z.im.is_zero() {
            return write!(f, "{}", fmt_rat(&z.re));
        }
        let im = if z.im.is_one() {
            "i".to_string()
        } else if (-z.im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{}i", fmt_rat(&z.im))
        };
        if z.re.is_zero() {
            write!(f, "{im}")
        } else if z.im.is_negative() {
            write!(f, "{}{}", fmt_rat(&z.re), im)
        } else {
            write!(f, "{}+{}", fmt_rat(&z.re), im)
        }
    }
}

/// Largest `k` with `k^2 | n` style helper: the square-free part of a
/// positive integer together with the square cofactor root. Trial division
/// only; inputs are small corpus constants.
pub fn squarefree_int(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.abs();
    let mut sf = BigInt::one();
    let mut root = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest).is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            root *= num_traits::pow(p.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                sf *= &p;
            }
        }
        p += 1;
        if p > BigInt::from(1_000_000) {
            break;
        }
    }
    sf *= rest;
    (sf, root)
}
