//! Congruence diagonalization over the semi-local ring.

use num_traits::{One, Zero};

use super::pivot::pivot_search;
use super::SemiLocalRing;
use crate::error::{Error, Result};
use crate::matpoly::{congruence_add, congruence_swap};
use crate::matrix::{Coeff, Matrix, PolyMatrix, RatMatrix};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::scalar::Scalar;

/// `T* M T = diag(b)` with `b_i = a_i u_i`, `a_i` monic and supported on the
/// modulus, `u_i` a unit of the ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagonalization<S: Scalar> {
    pub t: RatMatrix<S>,
    pub diag: Vec<RatFn<S>>,
    pub factors: Vec<Poly<S>>,
    pub units: Vec<RatFn<S>>,
}

impl<S: Coeff> Diagonalization<S> {
    /// Exact check of the congruence, ring membership of `T` and `T^{-1}`,
    /// and the factor/unit split.
    pub fn verify(&self, m: &PolyMatrix<S>, ring: &SemiLocalRing<S>) -> bool {
        let congruent = self.t.star().mul(&m.to_ratfn()).mul(&self.t) == Matrix::diag(&self.diag);
        let inv_ok = self
            .t
            .inverse()
            .is_some_and(|ti| ti.entries().iter().all(|f| ring.contains(f)));
        let split = self.diag.iter().zip(&self.factors).zip(&self.units).all(|((b, a), u)| {
            *b == &RatFn::from_poly(a.clone()) * u && ring.is_unit(u) && a.is_monic()
        });
        congruent && inv_ok && split && self.t.entries().iter().all(|f| ring.contains(f))
    }
}

/// Unimodular `E` with `E* M E` column-reduced: the leading coefficient
/// matrix at the diagonal half-degrees is nonsingular. Needs `M` psd.
pub fn reduce_degrees<S: Coeff>(m: &PolyMatrix<S>) -> (PolyMatrix<S>, PolyMatrix<S>) {
    let n = m.rows();
    let mut d = m.clone();
    let mut e = PolyMatrix::<S>::identity(n);
    for _ in 0..10_000 {
        let mut half = Vec::with_capacity(n);
        for i in 0..n {
            match d.get(i, i).degree() {
                Some(k) if k % 2 == 0 => half.push(k / 2),
                _ => return (e, d),
            }
        }
        let lead = Matrix::<S>::from_fn(n, n, |i, j| d.get(i, j).coeff(half[i] + half[j]));
        let Some(xi) = lead.kernel().into_iter().next() else {
            break;
        };
        let k = (0..n)
            .filter(|&i| !xi[i].is_zero())
            .max_by(|&a, &b| half[a].cmp(&half[b]).then(b.cmp(&a)))
            .unwrap();
        let before = half[k];
        for j in 0..n {
            if j != k && !xi[j].is_zero() {
                let c = Poly::monomial(xi[j].clone() / xi[k].clone(), half[k] - half[j]);
                congruence_add(&mut d, &mut e, k, j, &c);
            }
        }
        if d.get(k, k).degree().is_none_or(|g| g >= 2 * before) {
            break;
        }
    }
    (e, d)
}

fn check_input<S: Coeff>(m: &PolyMatrix<S>) -> Result<()> {
    crate::matrix::check_square(m)?;
    if !m.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    if m.det().is_zero() {
        return Err(Error::Degenerate);
    }
    Ok(())
}

/// Diagonalize with the first unit-valued pivot in search order at every
/// step.
pub fn diagonalize_semilocal<S: Coeff>(m: &PolyMatrix<S>, ring: &SemiLocalRing<S>) -> Result<Diagonalization<S>> {
    check_input(m)?;
    diagonalize_with(&m.to_ratfn(), ring, &|b| pivot_search(b, ring))
}

/// Diagonalization driven by a pivot chooser. The chooser sees the current
/// trailing block divided by its content and returns a vector with one
/// entry equal to 1 whose form value is a unit.
pub(crate) fn diagonalize_with<S: Coeff>(
    m: &RatMatrix<S>,
    ring: &SemiLocalRing<S>,
    choose: &dyn Fn(&RatMatrix<S>) -> Result<Vec<Poly<S>>>,
) -> Result<Diagonalization<S>> {
    let n = m.rows();
    let mut d = m.clone();
    let mut t = RatMatrix::<S>::identity(n);
    let mut factors = Vec::with_capacity(n);
    let mut units = Vec::with_capacity(n);
    for k in 0..n {
        let idx: Vec<usize> = (k..n).collect();
        let block = d.submatrix(&idx, &idx);
        let mut g = Poly::zero();
        for e in block.entries() {
            if !e.is_zero() {
                g = g.gcd(&ring.ideal_generator(e));
            }
        }
        if g.is_zero() {
            return Err(Error::Degenerate);
        }
        let gf = RatFn::from_poly(g.clone());
        let scaled = block.map(|e| e / &gf);
        let v = choose(&scaled)?;
        let p = v
            .iter()
            .position(|x| x.is_one())
            .ok_or_else(|| Error::PreconditionViolated("pivot vector lacks a unit entry".into()))?;
        for (i, vi) in v.iter().enumerate() {
            if i != p && !vi.is_zero() {
                congruence_add(&mut d, &mut t, k + p, k + i, &RatFn::from_poly(vi.clone()));
            }
        }
        if p != 0 {
            congruence_swap(&mut d, &mut t, k, k + p);
        }
        let piv = d.get(k, k).clone();
        let unit = &piv / &gf;
        if !ring.is_unit(&unit) {
            return Err(Error::VerificationFailed("pivot value is not a unit".into()));
        }
        for j in k + 1..n {
            if !d.get(k, j).is_zero() {
                let c = -(d.get(k, j) / &piv);
                congruence_add(&mut d, &mut t, j, k, &c);
            }
        }
        factors.push(g);
        units.push(unit);
    }
    let diag = (0..n).map(|i| d.get(i, i).clone()).collect();
    Ok(Diagonalization { t, diag, factors, units })
}
