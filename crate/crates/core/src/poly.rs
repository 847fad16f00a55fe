//! Dense univariate polynomials, lowest degree first.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Gauss, GaussDisplay, Rat, Scalar};

/// A polynomial in `t` with coefficients in `S`.
///
/// Invariant: no trailing zero coefficients. The zero polynomial is the empty
/// coefficient vector and has degree `None` (minus infinity).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Self::new(vec![S::zero(), S::one()])
    }

    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k];
        v.push(c);
        Self::new(v)
    }

    /// `t - z`
    pub fn linear(z: S) -> Self {
        Self::new(vec![-z, S::one()])
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| S::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    /// Coefficient-wise conjugation, `t` fixed.
    pub fn star(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_real())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().inv())
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lc_inv = d.lc().inv();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![S::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() * lc_inv.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].clone() - c.clone() * dc.clone();
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn lcm(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let g = self.gcd(other);
        (self * other).exact_div(&g).unwrap().monic()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_gauss(&self) -> Poly<Gauss> {
        self.map(|c| c.to_gauss())
    }

    /// Real projection, if every coefficient is real.
    pub fn to_rat(&self) -> Option<Poly<Rat>> {
        self.is_real().then(|| self.map(|c| c.re()))
    }

    /// Coefficients of `p(t + z)`, i.e. the Taylor expansion at `z`.
    pub fn taylor_shift(&self, z: &S) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] = c[j].clone() + z.clone() * c[j + 1].clone();
            }
        }
        Self::new(c)
    }

    /// Truncate to terms of degree `< k`.
    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().take(k).cloned().collect())
    }

    /// Multiplicity of `z` as a root.
    pub fn root_multiplicity(&self, z: &S) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Self::linear(z.clone());
        let mut p = self.clone();
        let mut m = 0;
        while let Some(q) = p.exact_div(&lin) {
            p = q;
            m += 1;
        }
        m
    }
}

impl<S: Scalar> Zero for Poly<S> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<S: Scalar> One for Poly<S> {
    fn one() -> Self {
        Poly {
            coeffs: vec![S::one()],
        }
    }
}

impl<'a, S: Scalar> Add<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a, S: Scalar> Sub<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a, S: Scalar> Mul<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<Poly<S>> for Poly<S> {
            type Output = Poly<S>;
            fn $m(self, rhs: Poly<S>) -> Poly<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Exact division; panics if the divisor does not divide. Used where
/// divisibility is an invariant of the caller.
impl<S: Scalar> Div<Poly<S>> for Poly<S> {
    type Output = Poly<S>;
    fn div(self, rhs: Poly<S>) -> Poly<S> {
        self.div_rem(&rhs).0
    }
}

impl<S: Scalar> Rem<Poly<S>> for Poly<S> {
    type Output = Poly<S>;
    fn rem(self, rhs: Poly<S>) -> Poly<S> {
        self.div_rem(&rhs).1
    }
}

fn fmt_coeff_gauss(c: &Gauss) -> String {
    let s = format!("{}", GaussDisplay(c));
    if !c.re.is_zero() && !c.im.is_zero() {
        format!("({s})")
    } else {
        s
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let g = c.to_gauss();
            let mut s = fmt_coeff_gauss(&g);
            let neg = s.starts_with('-');
            if neg {
                s.remove(0);
            }
            if !first {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let unit = s == "1";
            match k {
                0 => write!(f, "{s}")?,
                1 if unit => write!(f, "t")?,
                1 => write!(f, "{s}t")?,
                _ if unit => write!(f, "t^{k}")?,
                _ => write!(f, "{s}t^{k}")?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gi, ri};

    type P = Poly<Rat>;
    type G = Poly<Gauss>;

    #[test]
    fn zero_has_no_degree() {
        assert_eq!(P::zero().degree(), None);
        assert_eq!(P::from_i64s(&[0, 0]).degree(), None);
        assert_eq!(P::from_i64s(&[3]).degree(), Some(0));
    }

    #[test]
    fn star_conjugates_coefficients() {
        let p = G::new(vec![gi(0, -1), gi(1, 0)]); // t - i
        assert_eq!(p.star(), G::new(vec![gi(0, 1), gi(1, 0)]));
        let q = G::monomial(gi(1, 1), 2);
        assert_eq!(q.star(), G::monomial(gi(1, -1), 2));
        let r = P::from_i64s(&[1, 3, 1]);
        assert_eq!(r.star(), r);
    }

    #[test]
    fn division_and_gcd() {
        let a = P::from_i64s(&[-1, 0, 1]); // t^2-1
        let b = P::from_i64s(&[1, 1]);
        assert_eq!(a.exact_div(&b), Some(P::from_i64s(&[-1, 1])));
        let g = a.gcd(&P::from_i64s(&[2, 2]));
        assert_eq!(g, P::from_i64s(&[1, 1]));
        let (g, s, t) = a.xgcd(&P::from_i64s(&[0, 1]));
        assert!(g.is_one());
        assert_eq!(&(&s * &a) + &(&t * &P::t()), g);
    }

    #[test]
    fn taylor_shift_matches_composition() {
        let p = P::from_i64s(&[1, 2, 3]);
        let shifted = p.taylor_shift(&ri(2));
        // p(t+2) = 3t^2 + 14t + 17
        assert_eq!(shifted, P::from_i64s(&[17, 14, 3]));
    }

    #[test]
    fn display() {
        let p = G::new(vec![gi(-2, 0), gi(0, -3), gi(1, 0)]);
        assert_eq!(p.to_string(), "t^2 - 3it - 2");
    }
}
