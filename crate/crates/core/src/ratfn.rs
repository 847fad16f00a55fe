//! Reduced rational functions `num/den` with monic denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::scalar::{Gauss, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn<S> {
    num: Poly<S>,
    den: Poly<S>,
}

impl<S: Scalar> RatFn<S> {
    /// Reduce `num/den`. Panics on a zero denominator.
    pub fn new(num: Poly<S>, den: Poly<S>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let lc = d.lc();
        if !lc.is_one() {
            let inv = lc.inv();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFn { num: n, den: d }
    }

    pub fn from_poly(p: Poly<S>) -> Self {
        RatFn {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly<S> {
        &self.num
    }

    pub fn den(&self) -> &Poly<S> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_poly(&self) -> Option<Poly<S>> {
        self.is_polynomial().then(|| self.num.clone())
    }

    pub fn is_constant(&self) -> bool {
        self.is_polynomial() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<S> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn star(&self) -> Self {
        RatFn {
            num: self.num.star(),
            den: self.den.star(),
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverting zero rational function");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, &self.den * &self.den)
    }

    pub fn to_gauss(&self) -> RatFn<Gauss> {
        RatFn {
            num: self.num.to_gauss(),
            den: self.den.to_gauss(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.num.is_real() && self.den.is_real()
    }

    pub fn pow(&self, e: i32) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }
}

impl<S: Scalar> From<Poly<S>> for RatFn<S> {
    fn from(p: Poly<S>) -> Self {
        Self::from_poly(p)
    }
}

impl<S: Scalar> Zero for RatFn<S> {
    fn zero() -> Self {
        RatFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<S: Scalar> One for RatFn<S> {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<'a, S: Scalar> Add<&'a RatFn<S>> for &'a RatFn<S> {
    type Output = RatFn<S>;
    fn add(self, rhs: &RatFn<S>) -> RatFn<S> {
        if self.den == rhs.den {
            return RatFn::new(&self.num + &rhs.num, self.den.clone());
        }
        RatFn::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a, S: Scalar> Sub<&'a RatFn<S>> for &'a RatFn<S> {
    type Output = RatFn<S>;
    fn sub(self, rhs: &RatFn<S>) -> RatFn<S> {
        self + &(-rhs)
    }
}

impl<'a, S: Scalar> Mul<&'a RatFn<S>> for &'a RatFn<S> {
    type Output = RatFn<S>;
    fn mul(self, rhs: &RatFn<S>) -> RatFn<S> {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        if self.is_polynomial() && rhs.is_polynomial() {
            return RatFn::from_poly(&self.num * &rhs.num);
        }
        RatFn::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a, S: Scalar> Div<&'a RatFn<S>> for &'a RatFn<S> {
    type Output = RatFn<S>;
    fn div(self, rhs: &RatFn<S>) -> RatFn<S> {
        self * &rhs.inv()
    }
}

impl<S: Scalar> Neg for &RatFn<S> {
    type Output = RatFn<S>;
    fn neg(self) -> RatFn<S> {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<S: Scalar> Neg for RatFn<S> {
    type Output = RatFn<S>;
    fn neg(self) -> RatFn<S> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<RatFn<S>> for RatFn<S> {
            type Output = RatFn<S>;
            fn $m(self, rhs: RatFn<S>) -> RatFn<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl<S: Scalar> fmt::Display for RatFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<S: Scalar> fmt::Debug for RatFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFn({self})")
    }
}
