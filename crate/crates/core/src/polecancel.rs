//! Making rational factorizations polynomial by unitary left factors.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{Field, Matrix, PolyMatrix, RatMatrix};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::roots::factor_over_base;
use crate::scalar::{Gauss, Scalar};
use crate::splitoff::split_matrix_zero;

/// A `*`-invariant ring between `K[t]` and `K(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum SubringSpec {
    FunctionField,
    /// Fractions whose denominator is coprime to the monic modulus.
    SemiLocal(Poly<Gauss>),
    Polynomial,
}

impl SubringSpec {
    pub fn semi_local<S: Scalar>(modulus: &Poly<S>) -> Self {
        SubringSpec::SemiLocal(modulus.to_gauss().monic())
    }

    pub fn contains<S: Scalar>(&self, f: &RatFn<S>) -> bool {
        match self {
            SubringSpec::FunctionField => true,
            SubringSpec::SemiLocal(d) => f.den().to_gauss().gcd(d).is_one(),
            SubringSpec::Polynomial => f.is_polynomial(),
        }
    }

    pub fn is_star_invariant(&self) -> bool {
        match self {
            SubringSpec::SemiLocal(d) => d.star() == *d,
            _ => true,
        }
    }
}

/// `U* U = I` and every entry of `U` lies in `ring`.
pub fn check_unitary_over<S: Scalar>(u: &RatMatrix<S>, ring: &SubringSpec) -> bool {
    u.is_square() && u.gram().is_identity() && u.entries().iter().all(|f| ring.contains(f))
}

/// Monic least common denominator of the entries.
pub fn lcd<S: Scalar>(s: &RatMatrix<S>) -> Poly<S> {
    s.lcd()
}

/// Reflection `I - 2 w w* / (w* w)` with `w = x - y`; it maps `x` to `y`
/// whenever `x* x = y* y` and `y* x` is self-adjoint.
pub fn reflection<E: Field>(x: &[E], y: &[E]) -> Option<Matrix<E>> {
    let n = x.len();
    let w: Vec<E> = x.iter().zip(y).map(|(a, b)| a.clone() - b.clone()).collect();
    let ww = crate::matrix::inner(&w, &w);
    if ww.is_zero() {
        return w.iter().all(Zero::is_zero).then(|| Matrix::identity(n));
    }
    let two = E::one() + E::one();
    let c = two / ww;
    Some(Matrix::from_fn(n, n, |i, j| {
        let d = if i == j { E::one() } else { E::zero() };
        d - c.clone() * w[i].clone() * w[j].star()
    }))
}

/// Output of [`cancel_poles`]: `U S = Q` with `U` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct Cancellation {
    pub u: RatMatrix<Gauss>,
    pub q: PolyMatrix<Gauss>,
}

/// Find a unitary `U` over `K(t)` with `U S` polynomial, for square `S` with
/// `S* S` polynomial. With `real` set, the result stays real.
pub fn cancel_poles(s: &RatMatrix<Gauss>, real: bool) -> Result<Cancellation> {
    if !s.is_square() {
        return Err(Error::NotSquare);
    }
    if !s.gram().is_polynomial() {
        return Err(Error::NotPolynomialGram);
    }
    if real && !s.is_real() {
        return Err(Error::NonRealInput);
    }
    let n = s.rows();
    let a = lcd(s);
    if a.is_one() {
        return Ok(Cancellation {
            u: RatMatrix::identity(n),
            q: s.to_poly().unwrap(),
        });
    }
    let factors = factor_over_base(&a, real)?;
    if real && n % 2 == 1 && factors.iter().any(|f| f.factor.degree() == Some(2)) {
        let padded = s.direct_sum(&RatMatrix::identity(1));
        let c = cancel_poles(&padded, real)?;
        let (v, q) = strip_identity(&c.q, 1)?;
        let w = v.map(|x| RatFn::constant(x.clone())).mul(&c.u);
        let idx: Vec<usize> = (0..n).collect();
        return Ok(Cancellation {
            u: w.submatrix(&idx, &idx),
            q,
        });
    }
    let mut cur = s.scale(&RatFn::from_poly(a.clone())).to_poly().unwrap();
    let mut u = RatMatrix::<Gauss>::identity(n);
    for f in factors {
        for _ in 0..f.multiplicity {
            if f.factor.degree() == Some(1) {
                let step = split_matrix_zero(&cur, &f.root, real)?;
                let zbar = Poly::linear(f.root.conj());
                let uf = crate::matpoly::linear_pencil(&step.a)
                    .star()
                    .to_ratfn()
                    .scale(&RatFn::new(Poly::one(), zbar));
                u = uf.mul(&u);
                cur = step.p;
            } else {
                let s0 = split_matrix_zero(&cur, &f.root, true)?;
                let s1 = split_matrix_zero(&s0.p, &f.root, true)?;
                let t01 = crate::matpoly::linear_pencil(&s0.a).mul(&crate::matpoly::linear_pencil(&s1.a));
                let uf = t01
                    .star()
                    .to_ratfn()
                    .scale(&RatFn::new(Poly::one(), f.factor.clone()));
                u = uf.mul(&u);
                cur = s1.p;
            }
        }
    }
    Ok(Cancellation { u, q: cur })
}

/// Given `P* P = M ⊕ I_k`, return a constant unitary `V` and `Q` with
/// `V P = Q ⊕ I_k`.
pub fn strip_identity(p: &PolyMatrix<Gauss>, k: usize) -> Result<(Matrix<Gauss>, PolyMatrix<Gauss>)> {
    let size = p.rows();
    if !p.is_square() || k > size {
        return Err(Error::PreconditionViolated("shape".into()));
    }
    let n = size - k;
    let g = p.gram();
    for i in 0..size {
        for j in 0..size {
            if (i >= n || j >= n) && *g.get(i, j) != if i == j { Poly::one() } else { Poly::zero() } {
                return Err(Error::PreconditionViolated("P* P is not of the form M ⊕ I".into()));
            }
        }
    }
    let mut c = Matrix::<Gauss>::from_fn(size, k, |i, j| p.get(i, n + j).coeff(0));
    if p.submatrix(&(0..size).collect::<Vec<_>>(), &(n..size).collect::<Vec<_>>()).max_degree() > Some(0) {
        return Err(Error::PreconditionViolated("trailing columns are not constant".into()));
    }
    let mut v = Matrix::<Gauss>::identity(size);
    for j in 0..k {
        let target = n + j;
        let x = c.col(j);
        // bring a coordinate of rational modulus into place when needed
        let pos = (0..=target)
            .rev()
            .find(|&i| !x[i].is_zero() && (x[i].im.is_zero() || crate::scalar::rat_sqrt(&x[i].norm_sqr()).is_some()))
            .ok_or_else(|| Error::SearchExhausted("no rational unitary completion".into()))?;
        let mut perm = Matrix::<Gauss>::identity(size);
        perm.swap_rows(pos, target);
        let x: Vec<Gauss> = perm.mul(&Matrix::column(&x)).col(0);
        let modulus = crate::scalar::rat_sqrt(&x[target].norm_sqr()).unwrap();
        let phase = &x[target] / Gauss::from_rat(modulus);
        let y: Vec<Gauss> = (0..size).map(|i| if i == target { phase.clone() } else { Gauss::zero() }).collect();
        let h = reflection(&x, &y).ok_or_else(|| Error::PreconditionViolated("reflection".into()))?;
        let mut ph = Matrix::<Gauss>::identity(size);
        ph.set(target, target, phase.conj());
        let step = ph.mul(&h).mul(&perm);
        v = step.mul(&v);
        c = step.mul(&c);
    }
    let vp = PolyMatrix::from_constant(&v).mul(p);
    let idx: Vec<usize> = (0..n).collect();
    Ok((v, vp.submatrix(&idx, &idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gi, ri};

    type G = Poly<Gauss>;

    fn lin(z: Gauss) -> G {
        Poly::linear(z)
    }

    #[test]
    fn lcd_examples() {
        let s = RatMatrix::<Gauss>::identity(2);
        assert!(lcd(&s).is_one());
        let s = RatMatrix::diag(&[RatFn::new(lin(gi(0, 1)), lin(gi(0, -1)))]);
        assert_eq!(lcd(&s), lin(gi(0, -1)));
        let s = RatMatrix::diag(&[
            RatFn::new(G::one(), lin(gi(0, -1))),
            RatFn::new(G::one(), &lin(gi(0, -1)) * &lin(gi(2, 0))),
        ]);
        assert_eq!(lcd(&s), &lin(gi(0, -1)) * &lin(gi(2, 0)));
    }

    #[test]
    fn scalar_cancellation() {
        let s = RatMatrix::diag(&[RatFn::new(lin(gi(0, 1)), lin(gi(0, -1)))]);
        let c = cancel_poles(&s, false).unwrap();
        assert_eq!(c.q, PolyMatrix::identity(1));
        assert_eq!(c.u, RatMatrix::diag(&[RatFn::new(lin(gi(0, -1)), lin(gi(0, 1)))]));
        assert!(check_unitary_over(&c.u, &SubringSpec::FunctionField));
    }

    fn rotation() -> RatMatrix<Gauss> {
        // (t^2 - 1)^2 + (2t)^2 = (t^2 + 1)^2
        let d = G::from_i64s(&[1, 0, 1]);
        let a = G::from_i64s(&[-1, 0, 1]);
        let b = G::from_i64s(&[0, 2]);
        RatMatrix::from_rows(vec![
            vec![RatFn::new(a.clone(), d.clone()), RatFn::new(-&b, d.clone())],
            vec![RatFn::new(b, d.clone()), RatFn::new(a, d)],
        ])
    }

    #[test]
    fn real_rotation_twist() {
        let r = rotation();
        assert!(r.gram().is_identity());
        let q0 = PolyMatrix::from_rows(vec![
            vec![G::from_i64s(&[1]), G::from_i64s(&[0, 1])],
            vec![G::zero(), G::from_i64s(&[2, 0, 1])],
        ]);
        let s = r.mul(&q0.to_ratfn());
        let c = cancel_poles(&s, true).unwrap();
        assert!(check_unitary_over(&c.u, &SubringSpec::FunctionField));
        assert!(c.u.is_real() && c.q.is_real());
        assert_eq!(c.u.mul(&s), c.q.to_ratfn());
        assert_eq!(c.q.gram(), q0.gram());
    }

    #[test]
    fn real_odd_dimension_is_padded() {
        let r = rotation().direct_sum(&RatMatrix::identity(1));
        let q0 = PolyMatrix::from_rows(vec![
            vec![G::from_i64s(&[1]), G::from_i64s(&[0, 1]), G::zero()],
            vec![G::zero(), G::from_i64s(&[2, 0, 1]), G::from_i64s(&[1])],
            vec![G::from_i64s(&[0, 3]), G::zero(), G::from_i64s(&[1, 1])],
        ]);
        let s = r.mul(&q0.to_ratfn());
        let c = cancel_poles(&s, true).unwrap();
        assert!(c.u.gram().is_identity());
        assert!(c.u.is_real() && c.q.is_real());
        assert_eq!(c.u.mul(&s), c.q.to_ratfn());
    }

    #[test]
    fn complex_cancellation() {
        // rows mixed by a unitary with poles at i and at 2
        let u = RatMatrix::from_rows(vec![
            vec![RatFn::new(lin(gi(0, -1)), lin(gi(0, 1))), RatFn::zero()],
            vec![RatFn::zero(), RatFn::new(lin(gi(2, 0)), lin(gi(2, 0)))],
        ]);
        let s = u.mul(&PolyMatrix::diag(&[G::from_i64s(&[1, 1]), G::t()]).to_ratfn());
        let c = cancel_poles(&s, false).unwrap();
        assert!(c.u.gram().is_identity());
        assert_eq!(c.u.mul(&s), c.q.to_ratfn());
        let bad = RatMatrix::diag(&[RatFn::new(G::one(), G::t())]);
        assert_eq!(cancel_poles(&bad, false), Err(Error::NotPolynomialGram));
    }

    #[test]
    fn subring_membership() {
        let u = RatMatrix::diag(&[RatFn::new(lin(gi(0, -1)), lin(gi(0, 1)))]);
        let d = G::from_i64s(&[1, 0, 1]);
        assert!(!check_unitary_over(&u, &SubringSpec::semi_local(&d)));
        assert!(check_unitary_over(&u, &SubringSpec::semi_local(&G::from_i64s(&[-2, 1]))));
        assert!(!check_unitary_over(&u, &SubringSpec::Polynomial));
        assert!(SubringSpec::semi_local(&d).is_star_invariant());
        assert!(!SubringSpec::semi_local(&lin(gi(0, 1))).is_star_invariant());
    }

    #[test]
    fn strip_examples() {
        let q = PolyMatrix::from_rows(vec![
            vec![G::from_i64s(&[1]), G::from_i64s(&[0, 1])],
            vec![G::zero(), G::from_i64s(&[2, 0, 1])],
        ]);
        let p = q.direct_sum(&PolyMatrix::identity(1));
        let (v, q2) = strip_identity(&p, 1).unwrap();
        assert!(v.is_identity());
        assert_eq!(q2, q);
        let f = |a: i64| Gauss::new(ri(a) / ri(5), ri(0));
        let w = Matrix::from_rows(vec![
            vec![f(3), gi(0, 0), f(-4)],
            vec![gi(0, 0), gi(1, 0), gi(0, 0)],
            vec![f(4), gi(0, 0), f(3)],
        ]);
        assert!(w.gram().is_identity());
        let p2 = PolyMatrix::from_constant(&w).mul(&p);
        let (v, q3) = strip_identity(&p2, 1).unwrap();
        assert!(v.gram().is_identity());
        assert_eq!(q3.gram(), q.gram());
        let bad = PolyMatrix::diag(&[G::one(), G::from_i64s(&[0, 1])]);
        assert!(matches!(strip_identity(&bad, 1), Err(Error::PreconditionViolated(_))));
    }
}
