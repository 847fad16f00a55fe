//! Matrix-polynomial operations: positivity, one-sided evaluation and
//! division, factorization checks, Cauchy–Binet extension, equivalence of
//! factorizations, and congruence diagonalization over the function field.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{check_square, inner, Coeff, Matrix, PolyMatrix, RatMatrix, Ring};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::roots::psd_check;
use crate::scalar::{Gauss, Rat, Scalar};

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Coefficients `c_1, ..., c_n` of the characteristic polynomial
/// `s^n - c_1 s^(n-1) + ... ± c_n`, i.e. sums of principal minors.
pub fn char_coefficients<S: Scalar>(m: &PolyMatrix<S>) -> Vec<Poly<S>> {
    let n = m.rows();
    (1..=n)
        .map(|k| {
            subsets(n, k)
                .iter()
                .fold(Poly::zero(), |acc, idx| &acc + &m.principal_minor(idx))
        })
        .collect()
}

/// `M(x)` is positive semidefinite for every real `x`.
pub fn is_psd_matrix<S: Scalar>(m: &PolyMatrix<S>) -> Result<bool> {
    check_square(m)?;
    if !m.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    for c in char_coefficients(m) {
        if !psd_check(&c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_eval_shape<S: Coeff>(p: &PolyMatrix<S>, a: &Matrix<S>) -> Result<()> {
    if !a.is_square() || !p.is_square() || p.rows() != a.rows() {
        return Err(Error::SizeMismatch(format!(
            "{}x{} polynomial matrix against {}x{} constant",
            p.rows(),
            p.cols(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// `P_A = sum P_k A^k`.
pub fn eval_right<S: Coeff>(p: &PolyMatrix<S>, a: &Matrix<S>) -> Result<Matrix<S>> {
    check_eval_shape(p, a)?;
    let mut acc = Matrix::zeros(p.rows(), p.cols());
    for c in p.coeff_matrices().iter().rev() {
        acc = acc.mul(a).add(c);
    }
    Ok(acc)
}

/// `_A P = sum A^k P_k`.
pub fn eval_left<S: Coeff>(p: &PolyMatrix<S>, a: &Matrix<S>) -> Result<Matrix<S>> {
    check_eval_shape(p, a)?;
    let mut acc = Matrix::zeros(p.rows(), p.cols());
    for c in p.coeff_matrices().iter().rev() {
        acc = a.mul(&acc).add(c);
    }
    Ok(acc)
}

/// `S` with `P = (t I - A) S`. Requires `_A P = 0`.
pub fn divide_left<S: Coeff>(p: &PolyMatrix<S>, a: &Matrix<S>) -> Result<PolyMatrix<S>> {
    check_eval_shape(p, a)?;
    let cs = p.coeff_matrices();
    let n = p.rows();
    if cs.is_empty() {
        return Ok(Matrix::zeros(n, n));
    }
    // S_{m-1} = P_m, S_{k-1} = P_k + A S_k, and P_0 + A S_0 must vanish
    let m = cs.len() - 1;
    let mut s = vec![Matrix::zeros(n, n); m];
    let mut carry = Matrix::<S>::zeros(n, n);
    for k in (1..=m).rev() {
        carry = cs[k].add(&a.mul(&carry));
        s[k - 1] = carry.clone();
    }
    if !cs[0].add(&a.mul(&carry)).is_zero() {
        return Err(Error::NotDivisible);
    }
    Ok(PolyMatrix::from_coeff_matrices(n, n, &s))
}

/// `S` with `P = S (t I - A)`. Requires `P_A = 0`.
pub fn divide_right<S: Coeff>(p: &PolyMatrix<S>, a: &Matrix<S>) -> Result<PolyMatrix<S>> {
    check_eval_shape(p, a)?;
    let cs = p.coeff_matrices();
    let n = p.rows();
    if cs.is_empty() {
        return Ok(Matrix::zeros(n, n));
    }
    let m = cs.len() - 1;
    let mut s = vec![Matrix::zeros(n, n); m];
    let mut carry = Matrix::<S>::zeros(n, n);
    for k in (1..=m).rev() {
        carry = cs[k].add(&carry.mul(a));
        s[k - 1] = carry.clone();
    }
    if !cs[0].add(&carry.mul(a)).is_zero() {
        return Err(Error::NotDivisible);
    }
    Ok(PolyMatrix::from_coeff_matrices(n, n, &s))
}

/// `t I - A` as a polynomial matrix.
pub fn linear_pencil<S: Coeff>(a: &Matrix<S>) -> PolyMatrix<S> {
    PolyMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let c = Poly::constant(-a.get(i, j).clone());
        if i == j {
            &c + &Poly::t()
        } else {
            c
        }
    })
}

/// A checked claim `Q* Q = M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<S: Scalar> {
    pub q: PolyMatrix<S>,
    pub m: PolyMatrix<S>,
    pub verified: bool,
    /// `Q* Q - M`; zero exactly when verified.
    pub residual: PolyMatrix<S>,
}

impl<S: Scalar> Factorization<S> {
    /// Largest coefficient magnitude (squared) in the residual.
    pub fn residual_norm_sqr(&self) -> Rat {
        self.residual
            .entries()
            .iter()
            .flat_map(|p| p.coeffs().iter().map(Scalar::norm_sqr))
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

pub fn verify_factorization<S: Scalar>(q: &PolyMatrix<S>, m: &PolyMatrix<S>) -> Result<Factorization<S>> {
    if !m.is_square() || q.cols() != m.rows() {
        return Err(Error::SizeMismatch(format!(
            "Q is {}x{}, M is {}x{}",
            q.rows(),
            q.cols(),
            m.rows(),
            m.cols()
        )));
    }
    let residual = q.gram().sub(m);
    Ok(Factorization {
        q: q.clone(),
        m: m.clone(),
        verified: residual.is_zero(),
        residual,
    })
}

/// Signed conjugated maximal minors `v` of an `(n+1) x n` matrix `Q`, so that
/// `Q* v = 0`, `v* v = det(Q* Q)` and `det(Q | v) = det(Q* Q)`.
pub fn cauchy_binet_extend<S: Scalar>(q: &PolyMatrix<S>) -> Result<Vec<Poly<S>>> {
    let (k, n) = (q.rows(), q.cols());
    if k != n + 1 {
        return Err(Error::ShapeUnsupported { rows: k, cols: n });
    }
    let cols: Vec<usize> = (0..n).collect();
    let v: Vec<Poly<S>> = (0..k)
        .map(|i| {
            let rows: Vec<usize> = (0..k).filter(|&r| r != i).collect();
            let minor = q.submatrix(&rows, &cols).det().star();
            if (i + n) % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect();
    if v.iter().all(Poly::is_zero) {
        return Err(Error::DegenerateTarget);
    }
    Ok(v)
}

/// `(Q | v)` for the Cauchy–Binet vector `v`.
pub fn extend_square<S: Scalar>(q: &PolyMatrix<S>) -> Result<PolyMatrix<S>> {
    let v = cauchy_binet_extend(q)?;
    Ok(q.hstack(&Matrix::column(&v)))
}

fn constant_unitary<S: Coeff>(u: &RatMatrix<S>) -> Option<Matrix<S>> {
    let c = u
        .entries()
        .iter()
        .all(RatFn::is_constant)
        .then(|| u.map(|f| f.constant_value().unwrap()))?;
    c.gram().is_identity().then_some(c)
}

/// A constant unitary `U` with `U Q1 = Q2`, if one exists.
pub fn equivalence_witness<S: Coeff>(
    q1: &PolyMatrix<S>,
    q2: &PolyMatrix<S>,
    m: &PolyMatrix<S>,
) -> Result<Option<Matrix<S>>> {
    if q1.rows() != q2.rows() || q1.cols() != q2.cols() {
        return Err(Error::SizeMismatch("factorizations of different shapes".into()));
    }
    for q in [q1, q2] {
        if !verify_factorization(q, m)?.verified {
            return Err(Error::NotAFactorization);
        }
    }
    let n = m.rows();
    if m.det().is_zero() {
        return Err(Error::Degenerate);
    }
    let k = q1.rows();
    if k == n {
        let inv = q1.to_ratfn().inverse().ok_or(Error::Degenerate)?;
        return Ok(constant_unitary(&q2.to_ratfn().mul(&inv)));
    }
    if k != n + 1 {
        return Err(Error::ShapeUnsupported { rows: k, cols: n });
    }
    if !(q1.is_real() && q2.is_real()) {
        // the extension vector is only fixed up to a unit-norm scalar here
        if !coefficient_gram_equivalent(q1, q2) {
            return Ok(None);
        }
        return coefficient_isometry(q1, q2)
            .map(Some)
            .ok_or_else(|| Error::Indeterminate("no explicit unitary for equivalent factorizations".into()));
    }
    let e1 = extend_square(q1)?.to_ratfn();
    let inv = e1.inverse().ok_or(Error::Degenerate)?;
    let v2 = cauchy_binet_extend(q2)?;
    for sign in [1i64, -1] {
        let s = Poly::constant(S::from_i64(sign));
        let col: Vec<Poly<S>> = v2.iter().map(|p| &s * p).collect();
        let e2 = q2.hstack(&Matrix::column(&col)).to_ratfn();
        if let Some(u) = constant_unitary(&e2.mul(&inv)) {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Constant unitary `U` with `U Q1 = Q2` for factorizations of the same
/// nondegenerate `M` of shape `n x n` or `(n+1) x n`.
pub fn equivalent_factorizations<S: Coeff>(
    q1: &PolyMatrix<S>,
    q2: &PolyMatrix<S>,
    m: &PolyMatrix<S>,
) -> Result<bool> {
    Ok(equivalence_witness(q1, q2, m)?.is_some())
}

/// Matrix whose columns are all coefficient vectors of all columns of `Q`.
fn coefficient_columns<S: Coeff>(q: &PolyMatrix<S>, len: usize) -> Matrix<S> {
    let cs = q.coeff_matrices();
    Matrix::from_fn(q.rows(), q.cols() * len, |i, j| {
        let (col, k) = (j / len, j % len);
        cs.get(k).map_or_else(S::zero, |c| c.get(i, col).clone())
    })
}

fn coefficient_pair<S: Coeff>(q1: &PolyMatrix<S>, q2: &PolyMatrix<S>) -> (Matrix<S>, Matrix<S>) {
    let len = q1.max_degree().max(q2.max_degree()).map_or(1, |d| d + 1);
    (coefficient_columns(q1, len), coefficient_columns(q2, len))
}

/// Shape-independent equivalence test: a constant unitary `U` with
/// `U Q1 = Q2` exists exactly when the coefficient vectors of `Q1` and `Q2`
/// have equal Gram matrices (the map between their spans is then an
/// isometry, and complements are isometric by Witt cancellation).
pub fn coefficient_gram_equivalent<S: Coeff>(q1: &PolyMatrix<S>, q2: &PolyMatrix<S>) -> bool {
    if q1.rows() != q2.rows() || q1.cols() != q2.cols() {
        return false;
    }
    let (c1, c2) = coefficient_pair(q1, q2);
    c1.gram() == c2.gram()
}

/// Explicit `U` for [`coefficient_gram_equivalent`] inputs, available when
/// the coefficient span has codimension at most one.
pub fn coefficient_isometry<S: Coeff>(q1: &PolyMatrix<S>, q2: &PolyMatrix<S>) -> Option<Matrix<S>> {
    if !coefficient_gram_equivalent(q1, q2) {
        return None;
    }
    let (c1, c2) = coefficient_pair(q1, q2);
    let k = c1.rows();
    let all: Vec<usize> = (0..k).collect();
    let (_, piv) = c1.rref();
    let mut f1 = c1.submatrix(&all, &piv);
    let mut f2 = c2.submatrix(&all, &piv);
    match k - piv.len() {
        0 => {}
        1 => {
            let x1 = f1.star().kernel().pop()?;
            let x2 = f2.star().kernel().pop()?;
            let ratio = inner(&x1, &x1).re() / inner(&x2, &x2).re();
            let c = S::from_norm(&ratio)?;
            let x2: Vec<S> = x2.into_iter().map(|x| x * c.clone()).collect();
            f1 = f1.hstack(&Matrix::column(&x1));
            f2 = f2.hstack(&Matrix::column(&x2));
        }
        _ => return None,
    }
    let u = f2.mul(&f1.inverse()?);
    u.gram().is_identity().then_some(u)
}

/// Congruence diagonalization over the function field: `T* M T` diagonal.
pub fn diagonalize_congruence_field<S: Scalar>(
    m: &PolyMatrix<S>,
) -> Result<(RatMatrix<S>, Vec<RatFn<S>>)> {
    check_square(m)?;
    if !m.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let n = m.rows();
    let mut d = m.to_ratfn();
    let mut t = RatMatrix::<S>::identity(n);
    for k in 0..n {
        if d.get(k, k).is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !d.get(j, j).is_zero()) {
                congruence_swap(&mut d, &mut t, k, j);
            } else {
                let j = (k + 1..n)
                    .find(|&j| !d.get(k, j).is_zero())
                    .ok_or(Error::Degenerate)?;
                let mut done = false;
                for c in [Some(S::one()), S::imag_unit()].into_iter().flatten() {
                    let c = RatFn::constant(c);
                    let val = &(&c * d.get(j, k)) + &(&c * d.get(j, k)).star();
                    if !val.is_zero() {
                        congruence_add(&mut d, &mut t, k, j, &c);
                        done = true;
                        break;
                    }
                }
                if !done {
                    return Err(Error::Degenerate);
                }
            }
        }
        let p = d.get(k, k).clone();
        for j in k + 1..n {
            if !d.get(k, j).is_zero() {
                let c = -(d.get(k, j) / &p);
                congruence_add(&mut d, &mut t, j, k, &c);
            }
        }
    }
    let diag = (0..n).map(|i| d.get(i, i).clone()).collect();
    Ok((t, diag))
}

/// Column `dst += col src * c` on `T`, and the matching congruence on `D`.
pub(crate) fn congruence_add<E: Ring>(d: &mut Matrix<E>, t: &mut Matrix<E>, dst: usize, src: usize, c: &E) {
    t.add_col(dst, src, c);
    d.add_col(dst, src, c);
    d.add_row(dst, src, &c.star());
}

pub(crate) fn congruence_swap<E: Ring>(d: &mut Matrix<E>, t: &mut Matrix<E>, a: usize, b: usize) {
    t.swap_cols(a, b);
    d.swap_cols(a, b);
    d.swap_rows(a, b);
}

/// Real part of a Gaussian matrix, if it has no imaginary part.
pub fn gauss_matrix_to_rat(m: &Matrix<Gauss>) -> Option<Matrix<Rat>> {
    m.is_real().then(|| m.map(|z| z.re.clone()))
}
