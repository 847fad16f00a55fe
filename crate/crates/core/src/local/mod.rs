//! Forms over the semi-local ring of rational functions whose denominators
//! avoid the zeros of a fixed modulus.

mod conic;
mod diag;
mod norm;
mod pivot;
mod witt;

pub use conic::{represent_one, ConicBudget, ConicSolution};
pub use diag::{diagonalize_semilocal, reduce_degrees, Diagonalization};
pub use norm::{clear_norm_denominators, QuadExtElem};
pub use pivot::{pivot_search, pivot_search_tiered, PivotBudget};
pub use witt::{hermitian_sqrt, local_witt_step, snf_congruence, snf_congruence_with, CongruenceWitness, LocalBudget};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::roots::{factor_over_base, modulus_part};
use crate::scalar::Scalar;

/// Rational functions `c/e` with `gcd(e, d) = 1` for a monic modulus `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiLocalRing<S: Scalar> {
    modulus: Poly<S>,
}

impl<S: Scalar> SemiLocalRing<S> {
    pub fn new(modulus: &Poly<S>) -> Result<Self> {
        if modulus.is_zero() {
            return Err(Error::PreconditionViolated("zero modulus".into()));
        }
        Ok(SemiLocalRing {
            modulus: modulus.monic(),
        })
    }

    pub fn modulus(&self) -> &Poly<S> {
        &self.modulus
    }

    /// Distinct monic irreducible factors of the modulus over the base field.
    pub fn primes(&self, real: bool) -> Result<Vec<Poly<S>>> {
        if self.modulus.is_constant() {
            return Ok(Vec::new());
        }
        factor_over_base(&self.modulus, real)
            .map(|fs| fs.iter().filter_map(|f| poly_from_gauss(&f.factor)).collect())
    }

    pub fn contains(&self, f: &RatFn<S>) -> bool {
        f.den().gcd(&self.modulus).is_one()
    }

    pub fn is_unit(&self, f: &RatFn<S>) -> bool {
        !f.is_zero() && self.contains(f) && f.num().gcd(&self.modulus).is_one()
    }

    /// The monic part of `f`'s numerator supported on the modulus; `f` is this
    /// times a unit of the ring.
    pub fn ideal_generator(&self, f: &RatFn<S>) -> Poly<S> {
        modulus_part(f.num(), &self.modulus)
    }
}

/// A Gaussian polynomial as one over `S`, if `S` can hold its coefficients.
pub(crate) fn poly_from_gauss<S: Scalar>(p: &Poly<crate::scalar::Gauss>) -> Option<Poly<S>> {
    let mut cs = Vec::with_capacity(p.coeffs().len());
    for c in p.coeffs() {
        let im = if c.im.is_zero() {
            S::zero()
        } else {
            S::imag_unit()? * S::from_rat(c.im.clone())
        };
        cs.push(S::from_rat(c.re.clone()) + im);
    }
    Some(Poly::new(cs))
}

/// `f` lies in the semi-local ring of `ring`.
pub fn membership<S: Scalar>(f: &RatFn<S>, ring: &SemiLocalRing<S>) -> bool {
    ring.contains(f)
}

/// Order of `prime` in `f`, negative at poles. The zero function has no
/// finite valuation and reports `i64::MAX`.
pub fn valuation<S: Scalar>(f: &RatFn<S>, prime: &Poly<S>) -> i64 {
    if f.is_zero() {
        return i64::MAX;
    }
    let count = |p: &Poly<S>| {
        let mut p = p.clone();
        let mut k = 0;
        while let Some(q) = p.exact_div(prime) {
            p = q;
            k += 1;
        }
        k
    };
    count(f.num()) - count(f.den())
}
