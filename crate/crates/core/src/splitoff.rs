//! Splitting a linear factor `t I - A` off a square matrix polynomial at a
//! zero of `Q* Q`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matpoly::{divide_left, eval_left, linear_pencil};
use crate::matrix::{Matrix, PolyMatrix};
use crate::poly::Poly;
use crate::scalar::{gauss_sqrt, Gauss, Scalar};

type Vector = Vec<Gauss>;

/// `Q = (t I - A) P` with `A` normal and spectrum in `{z, z*}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitStep {
    pub z: Gauss,
    pub a: Matrix<Gauss>,
    pub p: PolyMatrix<Gauss>,
    pub basis_u: Vec<Vector>,
}

impl SplitStep {
    /// Exact check of every defining identity against the original `Q`.
    pub fn verify(&self, q: &PolyMatrix<Gauss>) -> bool {
        let n = self.a.rows();
        let a = &self.a;
        let normal = a.star().mul(a) == a.mul(&a.star());
        let zi = Matrix::<Gauss>::identity(n).scale(&self.z);
        let zbar = Matrix::<Gauss>::identity(n).scale(&self.z.conj());
        let spectrum = a.sub(&zi).mul(&a.sub(&zbar)).is_zero();
        let left_zero = eval_left(q, a).is_ok_and(|m| m.is_zero());
        let pencil = linear_pencil(a);
        let lin = Poly::linear(self.z.clone());
        let gram_ok = pencil.gram() == PolyMatrix::identity(n).scale(&(&lin.star() * &lin));
        let rebuild = pencil.mul(&self.p) == *q;
        normal && spectrum && left_zero && gram_ok && rebuild
    }
}

fn bilinear(x: &[Gauss], y: &[Gauss]) -> Gauss {
    x.iter().zip(y).fold(Gauss::zero(), |acc, (a, b)| acc + a * b)
}

fn rank(vs: &[Vector], n: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let data = vs.iter().flatten().cloned().collect();
    Matrix::new(vs.len(), n, data).rank()
}

/// Independent subset spanning the same space, in order.
fn independent(vs: &[Vector], n: usize) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vs {
        let mut trial = out.clone();
        trial.push(v.clone());
        if rank(&trial, n) > out.len() {
            out = trial;
        }
    }
    out
}

/// Small integer combinations of `basis`, in a fixed order.
fn combinations(basis: &[Vector], n: usize) -> Vec<Vector> {
    let mut out: Vec<Vector> = basis.to_vec();
    let coeffs = [1i64, -1, 2, -2];
    for a in 0..basis.len() {
        for b in a + 1..basis.len() {
            for &c in &coeffs {
                out.push(
                    (0..n)
                        .map(|k| &basis[a][k] + &basis[b][k] * Gauss::from_i64(c))
                        .collect(),
                );
            }
        }
    }
    out
}

/// Extend a set of vectors that are totally isotropic for `x^T y` to a
/// totally isotropic subspace of dimension `n/2`.
pub fn isotropic_completion(u0: &[Vector], n: usize) -> Result<Vec<Vector>> {
    if n % 2 == 1 {
        return Err(Error::OddDimension);
    }
    for x in u0 {
        for y in u0 {
            if !bilinear(x, y).is_zero() {
                return Err(Error::NotIsotropic);
            }
        }
    }
    let mut w = independent(u0, n);
    while w.len() < n / 2 {
        // complement of W inside its orthogonal space
        let perp: Vec<Vector> = if w.is_empty() {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { Gauss::one() } else { Gauss::zero() }).collect())
                .collect()
        } else {
            let rows = Matrix::new(w.len(), n, w.iter().flatten().cloned().collect());
            rows.kernel()
        };
        let mut comp = Vec::new();
        let mut acc = w.clone();
        for v in perp {
            acc.push(v.clone());
            if rank(&acc, n) == acc.len() {
                comp.push(v);
            } else {
                acc.pop();
            }
        }
        let x = find_isotropic(&comp, n).ok_or_else(|| {
            Error::PreconditionViolated("no isotropic vector found in the complement".into())
        })?;
        w.push(x);
    }
    Ok(w)
}

fn find_isotropic(comp: &[Vector], n: usize) -> Option<Vector> {
    if let Some(q) = comp.iter().find(|q| bilinear(q, q).is_zero()) {
        return Some(q.clone());
    }
    let cands = combinations(comp, n);
    for p in &cands {
        for q in &cands {
            let (bpp, bpq, bqq) = (bilinear(p, p), bilinear(p, q), bilinear(q, q));
            if bqq.is_zero() {
                continue;
            }
            let disc = &bpq * &bpq - &bpp * &bqq;
            let Some(s) = gauss_sqrt(&disc) else {
                continue;
            };
            let lambda = (-bpq + s) / bqq;
            let x: Vector = (0..n).map(|k| &p[k] + &q[k] * &lambda).collect();
            if !x.iter().all(Zero::is_zero) && bilinear(&x, &x).is_zero() {
                return Some(x);
            }
        }
    }
    None
}

/// Orthogonal projection onto the span of `basis`, `B (B* B)^{-1} B*`.
pub fn projection(basis: &[Vector], n: usize) -> Matrix<Gauss> {
    if basis.is_empty() {
        return Matrix::zeros(n, n);
    }
    let b = Matrix::new(basis.len(), n, basis.iter().flatten().cloned().collect()).transpose();
    let g = b.gram().inverse().expect("independent basis");
    b.mul(&g).mul(&b.star())
}

/// Evaluate a polynomial matrix at a scalar.
pub fn eval_at(q: &PolyMatrix<Gauss>, z: &Gauss) -> Matrix<Gauss> {
    q.map(|p| p.eval(z))
}

/// Column space basis of a constant matrix.
fn image(m: &Matrix<Gauss>) -> Vec<Vector> {
    let (_, piv) = m.rref();
    piv.iter().map(|&j| m.col(j)).collect()
}

/// Split `t I - A` off `Q` at a zero `z` of `Q* Q`. With `real` set, `A` is
/// chosen with real entries.
pub fn split_matrix_zero(q: &PolyMatrix<Gauss>, z: &Gauss, real: bool) -> Result<SplitStep> {
    let n = q.rows();
    if !q.is_square() {
        return Err(Error::NotSquare);
    }
    let g = q.gram();
    if !g.entries().iter().all(|p| p.eval(z).is_zero()) {
        return Err(Error::NotAZero);
    }
    let im = image(&eval_at(q, z));
    let basis_u = if real && !z.im.is_zero() {
        if n % 2 == 1 {
            return Err(Error::OddDimensionReal);
        }
        isotropic_completion(&im, n)?
    } else {
        im
    };
    let pu = projection(&basis_u, n);
    let id = Matrix::<Gauss>::identity(n);
    let a = pu.scale(&z.conj()).add(&id.sub(&pu).scale(z));
    let p = divide_left(q, &a)?;
    Ok(SplitStep {
        z: z.clone(),
        a,
        p,
        basis_u,
    })
}
