//! Unit sweeping and the congruence to the monic Smith form.

use num_traits::{One, Signed, Zero};

use super::conic::{represent_one, ConicBudget};
use super::diag::{diagonalize_with, reduce_degrees};
use super::norm::{clear_norm_denominators, QuadExtElem};
use super::pivot::{pivot_search_tiered, PivotBudget};
use super::{poly_from_gauss, SemiLocalRing};
use crate::error::{Error, Result};
use crate::matpoly::is_psd_matrix;
use crate::matrix::{Coeff, Matrix, PolyMatrix, RatMatrix};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::roots::{modulus_part, poly_sqrt, squarefree_decomposition};
use crate::scalar::{rat_sqrt, Rat, Scalar};
use crate::twosquares::scalar_fejer_riesz;

/// Search limits for the local pipeline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LocalBudget {
    pub pivot: PivotBudget,
    pub conic: ConicBudget,
}

/// `T* M T = diag(c_i a_i)` with `T` invertible over the semi-local ring of
/// `det M`, `a_i` the monic invariant factors and `c_i` positive rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct CongruenceWitness<S: Scalar> {
    pub t: RatMatrix<S>,
    pub source: PolyMatrix<S>,
    pub factors: Vec<Poly<S>>,
    pub constants: Vec<Rat>,
    pub modulus: Poly<S>,
}

impl<S: Coeff> CongruenceWitness<S> {
    pub fn target(&self) -> PolyMatrix<S> {
        let entries: Vec<Poly<S>> = self
            .factors
            .iter()
            .zip(&self.constants)
            .map(|(a, c)| a.scale(&S::from_rat(c.clone())))
            .collect();
        Matrix::diag(&entries)
    }

    pub fn ring(&self) -> SemiLocalRing<S> {
        SemiLocalRing::new(&self.modulus).expect("nonzero modulus")
    }

    /// Exact check of `T* M T = D`, ring membership of `T`, and `det T` a unit.
    pub fn verify(&self) -> bool {
        let ring = self.ring();
        let lhs = self.t.star().mul(&self.source.to_ratfn()).mul(&self.t);
        lhs == self.target().to_ratfn()
            && self.t.entries().iter().all(|f| ring.contains(f))
            && ring.is_unit(&self.t.det())
            && self.constants.iter().all(|c| c.is_positive())
    }
}

fn to_rat_fn<S: Scalar>(f: &RatFn<S>) -> Option<RatFn<Rat>> {
    Some(RatFn::new(f.num().to_rat()?, f.den().to_rat()?))
}

fn from_rat_fn<S: Scalar>(f: &RatFn<Rat>) -> RatFn<S> {
    let lift = |p: &Poly<Rat>| p.map(|c| S::from_rat(c.clone()));
    RatFn::new(lift(f.num()), lift(f.den()))
}

fn is_complex<S: Scalar>() -> bool {
    S::imag_unit().is_some()
}

/// Write a psd unit as `c w* w` with `c` a positive rational. Over a real
/// field this asks for `c` times a square and reports `None` otherwise;
/// over the Gaussian field it needs the roots in Q(i). Norms (squares) are
/// absorbed into `w`, leaving `c = 1`.
pub fn hermitian_sqrt<S: Scalar>(u: &RatFn<S>) -> Result<Option<(Rat, RatFn<S>)>> {
    if u.is_zero() {
        return Err(Error::Degenerate);
    }
    let p = (u.num() * u.den())
        .to_rat()
        .ok_or_else(|| Error::NotHermitian)?;
    let lead = p.lc();
    if lead.is_negative() {
        return Err(Error::NotPsd);
    }
    let monic = p.monic();
    let den = RatFn::from_poly(u.den().clone());
    let (root, scalar) = if is_complex::<S>() {
        let g = scalar_fejer_riesz(&monic)?.as_complex();
        let g = poly_from_gauss::<S>(&g).expect("complex field");
        (g, S::from_norm(&lead))
    } else {
        let Some(s) = poly_sqrt(&monic) else {
            return Ok(None);
        };
        (s.map(|c| S::from_rat(c.clone())), rat_sqrt(&lead).map(S::from_rat))
    };
    let w = &RatFn::from_poly(root) / &den;
    Ok(Some(match scalar {
        Some(z) => (Rat::one(), w.scale(&z)),
        None => (lead, w),
    }))
}

fn diag2<S: Scalar>(x: RatFn<S>, y: RatFn<S>) -> RatMatrix<S> {
    Matrix::diag(&[x, y])
}

/// `T` over the ring with `T* diag(a u, b v) T = diag(a, b u v)`, for `a | b`,
/// `a b | modulus` and units `u, v`.
pub fn local_witt_step<S: Coeff>(
    a: &Poly<S>,
    u: &RatFn<S>,
    b: &Poly<S>,
    v: &RatFn<S>,
    ring: &SemiLocalRing<S>,
    budget: &ConicBudget,
) -> Result<RatMatrix<S>> {
    if !a.divides(b) {
        return Err(Error::DivisibilityViolated(format!("{a} does not divide {b}")));
    }
    if !(a * b).divides(ring.modulus()) {
        return Err(Error::DivisibilityViolated(format!("{a} * {b} does not divide the modulus")));
    }
    if !ring.is_unit(u) || !ring.is_unit(v) {
        return Err(Error::PreconditionViolated("u and v must be units".into()));
    }
    let t = if u.is_one() {
        RatMatrix::identity(2)
    } else if is_complex::<S>() {
        match hermitian_sqrt(u)? {
            Some((c, w)) if c.is_one() => diag2(w.inv(), w),
            _ => return Err(Error::ConstantNotNorm(format!("{u}"))),
        }
    } else {
        real_witt(a, u, b, v, ring, budget)?
    };
    let (af, bf) = (RatFn::from_poly(a.clone()), RatFn::from_poly(b.clone()));
    let lhs = t.star().mul(&diag2(&af * u, &bf * v)).mul(&t);
    if lhs != diag2(af, &bf * &(u * v)) {
        return Err(Error::VerificationFailed("local Witt step".into()));
    }
    Ok(t)
}

fn real_witt<S: Coeff>(
    a: &Poly<S>,
    u: &RatFn<S>,
    b: &Poly<S>,
    v: &RatFn<S>,
    ring: &SemiLocalRing<S>,
    budget: &ConicBudget,
) -> Result<RatMatrix<S>> {
    let real_err = || Error::NonRealInput;
    let ur = to_rat_fn(u).ok_or_else(real_err)?;
    let ratio = RatFn::new(b.exact_div(a).unwrap(), Poly::one());
    let wr = &to_rat_fn(&ratio).ok_or_else(real_err)? * &to_rat_fn(v).ok_or_else(real_err)?;
    let rring = SemiLocalRing::new(&ring.modulus().to_rat().ok_or_else(real_err)?)?;
    let (x, y) = match represent_one(&ur, &wr, Some(&rring), budget) {
        Ok(sol) => (sol.x, sol.y),
        Err(Error::SearchExhausted(msg)) => {
            let sol = represent_one(&ur, &wr, None, budget).map_err(|_| Error::SearchExhausted(msg))?;
            into_ring(&ur, &wr, &sol.x, &sol.y, &rring)?
        }
        Err(e) => return Err(e),
    };
    let (x, y, w, us) = (from_rat_fn::<S>(&x), from_rat_fn::<S>(&y), from_rat_fn::<S>(&wr), u.clone());
    Ok(Matrix::from_rows(vec![
        vec![x.clone(), -(&w * &y)],
        vec![y, &us * &x],
    ]))
}

/// Move a field solution of `u x^2 + w y^2 = 1` into the ring through the
/// norm form of `sqrt(-u w)`.
fn into_ring(
    u: &RatFn<Rat>,
    w: &RatFn<Rat>,
    x: &RatFn<Rat>,
    y: &RatFn<Rat>,
    ring: &SemiLocalRing<Rat>,
) -> Result<(RatFn<Rat>, RatFn<Rat>)> {
    let uw = u * w;
    let p = -(uw.num() * uw.den());
    let mut c0 = Poly::constant(p.lc());
    let mut h = Poly::<Rat>::one();
    for (f, k) in squarefree_decomposition(&p.monic()) {
        if k % 2 == 1 {
            c0 = &c0 * &f;
        }
        h = &h * &f.pow(k / 2);
    }
    let den = RatFn::from_poly(uw.den().clone());
    let hf = RatFn::from_poly(h.clone());
    let gamma = QuadExtElem::new(u * x, &(y * &hf) / &den, c0);
    let e = modulus_part(&h, ring.modulus());
    let alpha = clear_norm_denominators(&gamma, ring, &e)?;
    let x2 = &alpha.u / u;
    let y2 = &(&alpha.v * &den) / &hf;
    if !ring.contains(&x2) || !ring.contains(&y2) {
        return Err(Error::VerificationFailed("cleared solution left the ring".into()));
    }
    Ok((x2, y2))
}

/// Column operation `T[:, (i, j)] <- T[:, (i, j)] * B`.
fn apply_pair<S: Scalar>(t: &mut RatMatrix<S>, i: usize, j: usize, b: &RatMatrix<S>) {
    for r in 0..t.rows() {
        let (x, y) = (t.get(r, i).clone(), t.get(r, j).clone());
        t.set(r, i, &(&x * b.get(0, 0)) + &(&y * b.get(1, 0)));
        t.set(r, j, &(&x * b.get(0, 1)) + &(&y * b.get(1, 1)));
    }
}

/// Pivot preference: constant norms first, then constants, then values that
/// are a constant times a hermitian square, then the rest.
fn pivot_rank<S: Scalar>(val: &RatFn<S>) -> u32 {
    if let Some(c) = val.constant_value() {
        let c = c.re();
        let nice = if is_complex::<S>() {
            S::from_norm(&c).is_some()
        } else {
            rat_sqrt(&c).is_some()
        };
        return if nice { 0 } else { 1 };
    }
    match hermitian_sqrt(val) {
        Ok(Some(_)) => 2,
        _ => 3,
    }
}

fn choose_pivot<S: Coeff>(
    b: &RatMatrix<S>,
    ring: &SemiLocalRing<S>,
    budget: &PivotBudget,
) -> Result<Vec<Poly<S>>> {
    let cands = pivot_search_tiered(b, ring, budget, 8, pivot_rank)?;
    Ok(cands[0].0.clone())
}

/// Congruence over the semi-local ring of `det M` from a psd nondegenerate
/// `M` to its monic Smith form, up to positive rational constants.
pub fn snf_congruence<S: Coeff>(m: &PolyMatrix<S>) -> Result<CongruenceWitness<S>> {
    snf_congruence_with(m, &LocalBudget::default())
}

pub fn snf_congruence_with<S: Coeff>(m: &PolyMatrix<S>, budget: &LocalBudget) -> Result<CongruenceWitness<S>> {
    crate::matrix::check_square(m)?;
    if !m.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let det = m.det();
    if det.is_zero() {
        return Err(Error::Degenerate);
    }
    let n = m.rows();
    let ring = SemiLocalRing::new(&det)?;
    // degree reduction needs a psd leading form; otherwise the units decide
    let (e, reduced) = if is_psd_matrix(m)? {
        reduce_degrees(m)
    } else {
        (PolyMatrix::identity(n), m.clone())
    };
    let dg = diagonalize_with(&reduced.to_ratfn(), &ring, &|b| choose_pivot(b, &ring, &budget.pivot))?;
    let mut t = e.to_ratfn().mul(&dg.t);
    let factors = dg.factors.clone();
    let mut units = dg.units.clone();
    let mut constants = vec![Rat::one(); n];

    let absorb = |t: &mut RatMatrix<S>, i: usize, u: &RatFn<S>| -> Result<Option<Rat>> {
        Ok(match hermitian_sqrt(u)? {
            Some((c, w)) => {
                let inv = w.inv();
                for r in 0..n {
                    let x = t.get(r, i) * &inv;
                    t.set(r, i, x);
                }
                Some(c)
            }
            None => None,
        })
    };

    if is_complex::<S>() {
        for i in 0..n {
            constants[i] = absorb(&mut t, i, &units[i])?.expect("complex absorption");
        }
    } else {
        for i in 0..n {
            if let Some(c) = absorb(&mut t, i, &units[i])? {
                units[i] = RatFn::constant(S::from_rat(c));
            }
        }
        for i in 0..n.saturating_sub(1) {
            if units[i].is_one() {
                continue;
            }
            match local_witt_step(&factors[i], &units[i], &factors[i + 1], &units[i + 1], &ring, &budget.conic) {
                Ok(step) => {
                    apply_pair(&mut t, i, i + 1, &step);
                    let merged = &units[i] * &units[i + 1];
                    units[i] = RatFn::one();
                    units[i + 1] = match absorb(&mut t, i + 1, &merged)? {
                        Some(c) => RatFn::constant(S::from_rat(c)),
                        None => merged,
                    };
                }
                Err(err) => {
                    if !units[i].is_constant() {
                        return Err(err);
                    }
                }
            }
        }
        for i in 0..n {
            constants[i] = units[i]
                .constant_value()
                .map(|c| c.re())
                .ok_or_else(|| Error::Indeterminate(format!("unit {} is not a constant times a square", units[i])))?;
        }
    }
    let witness = CongruenceWitness {
        t,
        source: m.clone(),
        factors,
        constants,
        modulus: ring.modulus().clone(),
    };
    if !witness.verify() {
        return Err(Error::VerificationFailed("Smith form congruence".into()));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gi, rat, ri, Gauss};
    use crate::smith::smith_normal_form;

    type P = Poly<Rat>;

    fn pm(rows: Vec<Vec<&[i64]>>) -> PolyMatrix<Rat> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(P::from_i64s).collect()).collect())
    }

    #[test]
    fn witt_examples() {
        let ring = SemiLocalRing::new(&P::from_i64s(&[0, 0, 1])).unwrap();
        let one = RatFn::one();
        let t = local_witt_step(&P::t(), &one, &P::t(), &one, &ring, &ConicBudget::default()).unwrap();
        assert!(t.is_identity());

        let u = RatFn::constant(ri(2));
        let v = RatFn::constant(rat(1, 2));
        let t = local_witt_step(&P::t(), &u, &P::t(), &v, &ring, &ConicBudget::default()).unwrap();
        let c = |q: Rat| RatFn::constant(q);
        assert_eq!(
            t,
            Matrix::from_rows(vec![vec![c(rat(1, 2)), c(rat(-1, 2))], vec![c(ri(1)), c(ri(1))]])
        );
        assert_eq!(
            local_witt_step(&P::from_i64s(&[1, 1]), &one, &P::t(), &one, &ring, &ConicBudget::default()),
            Err(Error::DivisibilityViolated("t + 1 does not divide t".into()))
        );
    }

    #[test]
    fn complex_witt_absorbs_hermitian_square() {
        let ring = SemiLocalRing::new(&Poly::<Gauss>::from_i64s(&[0, 1])).unwrap();
        let u = RatFn::from_poly(Poly::<Gauss>::from_i64s(&[1, 0, 1]));
        let one = RatFn::one();
        let t = local_witt_step(&Poly::one(), &u, &Poly::t(), &one, &ring, &ConicBudget::default()).unwrap();
        assert!(t.get(0, 1).is_zero() && t.get(1, 0).is_zero());
        let w = t.get(1, 1);
        assert_eq!(&w.star() * w, u);
        let _ = gi(0, 0);
    }

    #[test]
    fn congruence_examples() {
        let d = pm(vec![vec![&[1], &[]], vec![&[], &[1, 0, 1]]]);
        let w = snf_congruence(&d).unwrap();
        assert!(w.t.is_identity());
        assert!(w.verify());

        let m = pm(vec![vec![&[0, 2], &[0, 1]], vec![&[0, 1], &[0, 1]]]);
        let w = snf_congruence(&m).unwrap();
        assert_eq!(w.target(), pm(vec![vec![&[0, 1], &[]], vec![&[], &[0, 1]]]));
        assert!(w.verify());
    }

    #[test]
    fn planted_unimodular() {
        let s0 = pm(vec![vec![&[1], &[0, 1]], vec![&[0, 1], &[1, 0, 1]]]);
        let dd = pm(vec![vec![&[1], &[]], vec![&[], &[4, 0, 5, 0, 1]]]);
        let m = s0.transpose().mul(&dd).mul(&s0);
        let w = snf_congruence(&m).unwrap();
        assert!(w.verify());
        assert_eq!(w.factors, smith_normal_form(&m).invariant_factors);
        assert!(w.t.is_polynomial());
    }

    #[test]
    fn complex_planted() {
        let g = |cs: &[i64]| Poly::<Gauss>::from_i64s(cs);
        let s0 = Matrix::from_rows(vec![vec![g(&[1]), g(&[0, 1])], vec![g(&[0]), g(&[1])]]);
        let dd = Matrix::diag(&[g(&[1]), g(&[4, 0, 5, 0, 1])]);
        let m = s0.star().mul(&dd).mul(&s0);
        let w = snf_congruence(&m).unwrap();
        assert!(w.verify());
        assert_eq!(w.factors, smith_normal_form(&m).invariant_factors);
    }
}
