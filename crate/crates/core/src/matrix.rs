//! Dense matrices over constants, polynomials, and rational functions.

use std::fmt;
use std::ops::{Div, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::scalar::{Gauss, Rat, Scalar};

/// Commutative ring with involution.
pub trait Ring:
    Clone + PartialEq + fmt::Debug + Zero + One + Sub<Output = Self> + Neg<Output = Self> + Send + Sync
{
    fn star(&self) -> Self;
}

pub trait Field: Ring + Div<Output = Self> {}

impl Ring for Rat {
    fn star(&self) -> Self {
        self.clone()
    }
}

impl Ring for Gauss {
    fn star(&self) -> Self {
        self.conj()
    }
}

impl<S: Scalar> Ring for Poly<S> {
    fn star(&self) -> Self {
        Poly::star(self)
    }
}

impl<S: Scalar> Ring for RatFn<S> {
    fn star(&self) -> Self {
        RatFn::star(self)
    }
}

/// Scalar usable as a matrix entry: the rationals or the Gaussian rationals.
pub trait Coeff: Scalar + Field {}
impl<S: Scalar + Field> Coeff for S {}

impl Field for Rat {}
impl Field for Gauss {}
impl<S: Scalar> Field for RatFn<S> {}

/// Coefficient field of a matrix: real entries or Gaussian entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Real,
    Complex,
}

impl FieldTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldTag::Real => "real",
            FieldTag::Complex => "complex",
        }
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

pub type PolyMatrix<S> = Matrix<Poly<S>>;
pub type RatMatrix<S> = Matrix<RatFn<S>>;

impl<E: Ring> Matrix<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data: Vec<E> = rows.into_iter().flatten().collect();
        Self::new(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> E) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| E::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { E::one() } else { E::zero() })
    }

    pub fn diag(entries: &[E]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { E::zero() })
    }

    pub fn column(entries: &[E]) -> Self {
        Self::new(entries.len(), 1, entries.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map<F: Ring>(&self, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Conjugate transpose.
    pub fn star(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).star())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.star()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = E::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a.clone() * b.clone();
                }
            }
            acc
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape");
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).clone() + rhs.get(i, j).clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape");
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).clone() - rhs.get(i, j).clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e.clone())
    }

    pub fn scale(&self, c: &E) -> Self {
        self.map(|e| c.clone() * e.clone())
    }

    /// `self* self`.
    pub fn gram(&self) -> Self {
        self.star().mul(self)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows);
        Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols);
        Self::from_fn(self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                rhs.get(i - self.rows, j).clone()
            }
        })
    }

    /// Block diagonal sum `self ⊕ rhs`.
    pub fn direct_sum(&self, rhs: &Self) -> Self {
        let (r, c) = (self.rows, self.cols);
        Self::from_fn(r + rhs.rows, c + rhs.cols, |i, j| match (i < r, j < c) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => rhs.get(i - r, j - c).clone(),
            _ => E::zero(),
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Row `dst += c * row src`.
    pub fn add_row(&mut self, dst: usize, src: usize, c: &E) {
        for j in 0..self.cols {
            let v = self.get(dst, j).clone() + c.clone() * self.get(src, j).clone();
            self.set(dst, j, v);
        }
    }

    /// Column `dst += col src * c`.
    pub fn add_col(&mut self, dst: usize, src: usize, c: &E) {
        for i in 0..self.rows {
            let v = self.get(i, dst).clone() + self.get(i, src).clone() * c.clone();
            self.set(i, dst, v);
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &E) {
        for j in 0..self.cols {
            let v = c.clone() * self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &E) {
        for i in 0..self.rows {
            let v = self.get(i, j).clone() * c.clone();
            self.set(i, j, v);
        }
    }

    /// Determinant by cofactor expansion along the sparsest row. Matrices in
    /// this crate are small.
    pub fn det(&self) -> E {
        assert!(self.is_square(), "determinant of a non-square matrix");
        det_rec(self)
    }

    /// Principal minor on the index set `idx`.
    pub fn principal_minor(&self, idx: &[usize]) -> E {
        self.submatrix(idx, idx).det()
    }
}

fn det_rec<E: Ring>(m: &Matrix<E>) -> E {
    let n = m.rows;
    match n {
        0 => return E::one(),
        1 => return m.get(0, 0).clone(),
        2 => {
            return m.get(0, 0).clone() * m.get(1, 1).clone()
                - m.get(0, 1).clone() * m.get(1, 0).clone()
        }
        _ => {}
    }
    let row = (0..n)
        .max_by_key(|&i| (0..n).filter(|&j| m.get(i, j).is_zero()).count())
        .unwrap();
    let mut acc = E::zero();
    let rest: Vec<usize> = (0..n).filter(|&i| i != row).collect();
    for j in 0..n {
        let a = m.get(row, j);
        if a.is_zero() {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let minor = det_rec(&m.submatrix(&rest, &cols));
        let term = a.clone() * minor;
        acc = if (row + j) % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

impl<E: Field> Matrix<E> {
    /// Inverse by Gauss–Jordan elimination, `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let p = (k..n).find(|&i| !a.get(i, k).is_zero())?;
            a.swap_rows(k, p);
            inv.swap_rows(k, p);
            let piv = E::one() / a.get(k, k).clone();
            a.scale_row(k, &piv);
            inv.scale_row(k, &piv);
            for i in 0..n {
                if i != k && !a.get(i, k).is_zero() {
                    let c = -a.get(i, k).clone();
                    a.add_row(i, k, &c);
                    inv.add_row(i, k, &c);
                }
            }
        }
        Some(inv)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            let piv = E::one() / a.get(r, c).clone();
            a.scale_row(r, &piv);
            for i in 0..self.rows {
                if i != r && !a.get(i, c).is_zero() {
                    let f = -a.get(i, c).clone();
                    a.add_row(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, as columns.
    pub fn kernel(&self) -> Vec<Vec<E>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![E::zero(); self.cols];
                v[f] = E::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }
}

impl<S: Scalar> PolyMatrix<S> {
    pub fn max_degree(&self) -> Option<usize> {
        self.data.iter().filter_map(Poly::degree).max()
    }

    /// Coefficient matrices `P_0, ..., P_m` of `P = sum P_k t^k`.
    pub fn coeff_matrices(&self) -> Vec<Matrix<S>>
    where
        S: Ring,
    {
        let m = self.max_degree().map_or(0, |d| d + 1);
        (0..m)
            .map(|k| Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).coeff(k)))
            .collect()
    }

    pub fn from_coeff_matrices(rows: usize, cols: usize, cs: &[Matrix<S>]) -> Self
    where
        S: Ring,
    {
        Self::from_fn(rows, cols, |i, j| {
            Poly::new(cs.iter().map(|c| c.get(i, j).clone()).collect())
        })
    }

    pub fn to_ratfn(&self) -> RatMatrix<S> {
        self.map(|p| RatFn::from_poly(p.clone()))
    }

    pub fn to_gauss(&self) -> PolyMatrix<Gauss> {
        self.map(Poly::to_gauss)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(Poly::is_real)
    }

    pub fn to_rat(&self) -> Option<PolyMatrix<Rat>> {
        let data: Option<Vec<_>> = self.data.iter().map(Poly::to_rat).collect();
        Some(Matrix::new(self.rows, self.cols, data?))
    }

    pub fn from_constant(c: &Matrix<S>) -> Self
    where
        S: Ring,
    {
        c.map(|x| Poly::constant(x.clone()))
    }

    /// Constant matrix if every entry has degree at most zero.
    pub fn to_constant(&self) -> Option<Matrix<S>>
    where
        S: Ring,
    {
        self.data
            .iter()
            .all(|p| p.is_zero() || p.is_constant())
            .then(|| self.map(|p| p.coeff(0)))
    }
}

impl<S: Scalar> RatMatrix<S> {
    pub fn is_polynomial(&self) -> bool {
        self.data.iter().all(RatFn::is_polynomial)
    }

    pub fn to_poly(&self) -> Option<PolyMatrix<S>> {
        self.is_polynomial().then(|| self.map(|f| f.num().clone()))
    }

    pub fn to_gauss(&self) -> RatMatrix<Gauss> {
        self.map(RatFn::to_gauss)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(RatFn::is_real)
    }

    /// Monic least common multiple of the entry denominators.
    pub fn lcd(&self) -> Poly<S> {
        self.data.iter().fold(Poly::one(), |acc, f| acc.lcm(f.den()))
    }
}

impl Matrix<Gauss> {
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im.is_zero())
    }
}

impl<E: Ring + fmt::Display> fmt::Display for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl<E: Ring> fmt::Debug for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &self.data)
            .finish()
    }
}

pub(crate) fn check_square<E: Ring>(m: &Matrix<E>) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare)
    }
}

/// Inner product `x* y` of column vectors.
pub fn inner<E: Ring>(x: &[E], y: &[E]) -> E {
    x.iter()
        .zip(y)
        .fold(E::zero(), |acc, (a, b)| acc + a.star() * b.clone())
}
