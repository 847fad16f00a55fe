//! End-to-end factorization drivers, class enumeration and classification.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::local::{poly_from_gauss, reduce_degrees, snf_congruence_with, CongruenceWitness, LocalBudget, SemiLocalRing};
use crate::matpoly::{
    cauchy_binet_extend, equivalence_witness, equivalent_factorizations, is_psd_matrix, verify_factorization,
    Factorization,
};
use crate::matrix::{Coeff, Matrix, PolyMatrix, RatMatrix};
use crate::polecancel::{cancel_poles, reflection, Cancellation};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::roots::{gaussian_roots, poly_sqrt};
use crate::scalar::{Gauss, Rat, Scalar};
use crate::smith::smith_normal_form;
use crate::twosquares::{
    enumerate_complex_scalar_classes, enumerate_two_squares_real, o2_equivalent, scalar_fejer_riesz, u1_equivalent,
    TwoSquares,
};

/// Search limits for the factorization pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub local: LocalBudget,
    /// Coordinate bound for the constant Gram factor search.
    pub constant_height: i64,
    /// Cap on candidate vectors per constant Gram factor level.
    pub constant_candidates: usize,
    /// Denominator bound for rational rotations tried by classification.
    pub rotation_height: i64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            local: LocalBudget::default(),
            constant_height: 4,
            constant_candidates: 100_000,
            rotation_height: 3,
        }
    }
}

/// Intermediate data of a pipeline run.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<S: Scalar> {
    pub congruence: Option<CongruenceWitness<S>>,
    pub cancellation: Option<Cancellation>,
    /// Unimodular `W` with `W* M W = 0 ⊕ M'` for singular input.
    pub kernel_basis: Option<PolyMatrix<S>>,
    /// Orthogonal `U` used by the real square route.
    pub reflection: Option<RatMatrix<S>>,
}

impl<S: Scalar> Default for Witness<S> {
    fn default() -> Self {
        Witness {
            congruence: None,
            cancellation: None,
            kernel_basis: None,
            reflection: None,
        }
    }
}

/// A verified factorization with its witness chain.
#[derive(Clone, Debug, PartialEq)]
pub struct Traced<S: Scalar> {
    pub factorization: Factorization<S>,
    pub witness: Witness<S>,
}

/// A factorization labelled by its two-squares class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifiedFactorization<S: Scalar> {
    pub factorization: Factorization<S>,
    pub cls: TwoSquares,
    /// Cauchy–Binet vector of an `(n+1) x n` factorization.
    pub v: Option<Vec<Poly<S>>>,
    /// `U` over the semi-local ring of `det M` with `U v = (0, ..., 0, a, b)`.
    pub compression: Option<RatMatrix<S>>,
    pub witness: Witness<S>,
}

fn checked<S: Scalar>(q: PolyMatrix<S>, m: &PolyMatrix<S>, witness: Witness<S>) -> Result<Traced<S>> {
    let factorization = verify_factorization(&q, m)?;
    if !factorization.verified {
        return Err(Error::VerificationFailed("Q* Q differs from M".into()));
    }
    Ok(Traced { factorization, witness })
}

fn check_input<S: Scalar>(m: &PolyMatrix<S>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare);
    }
    if !m.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    if !is_psd_matrix(m)? {
        return Err(Error::NotPsd);
    }
    Ok(())
}

fn from_gauss<S: Scalar>(q: &PolyMatrix<Gauss>) -> Result<PolyMatrix<S>> {
    let entries = q
        .entries()
        .iter()
        .map(poly_from_gauss::<S>)
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::NonRealInput)?;
    Ok(Matrix::new(q.rows(), q.cols(), entries))
}

/// Apply `core` to the nondegenerate part of `M` and re-attach the kernel.
/// `extra` is the number of rows the core adds beyond its column count.
fn split_kernel<S: Coeff>(
    m: &PolyMatrix<S>,
    extra: usize,
    core: impl Fn(&PolyMatrix<S>) -> Result<Traced<S>>,
) -> Result<Traced<S>> {
    if !m.det().is_zero() {
        return core(m);
    }
    let n = m.rows();
    let kernel = m.to_ratfn().kernel();
    let r = n - kernel.len();
    let cols: Vec<Vec<Poly<S>>> = kernel
        .iter()
        .map(|v| {
            let l = v.iter().fold(Poly::one(), |acc, f| acc.lcm(f.den()));
            let l = RatFn::from_poly(l);
            v.iter().map(|f| (f * &l).to_poly().expect("cleared")).collect()
        })
        .collect();
    let k = Matrix::from_fn(n, n - r, |i, j| cols[j][i].clone());
    let s = smith_normal_form(&k).s;
    let w = s
        .to_ratfn()
        .inverse()
        .and_then(|x| x.to_poly())
        .ok_or_else(|| Error::VerificationFailed("kernel completion is not unimodular".into()))?;
    let reduced = w.star().mul(m).mul(&w);
    let idx: Vec<usize> = (n - r..n).collect();
    let inner = if r == 0 {
        None
    } else {
        Some(core(&reduced.submatrix(&idx, &idx))?)
    };
    let rows = n + extra;
    let padded = Matrix::from_fn(rows, n, |i, j| match &inner {
        Some(t) if j >= n - r && i < t.factorization.q.rows() => t.factorization.q.get(i, j - (n - r)).clone(),
        _ => Poly::zero(),
    });
    let mut witness = inner.map(|t| t.witness).unwrap_or_default();
    witness.kernel_basis = Some(w);
    checked(padded.mul(&s), m, witness)
}

/// Integer vectors (Gaussian integers when `S` is complex) whose largest
/// coordinate has absolute value `level`, first nonzero coordinate positive.
fn shell<S: Scalar>(n: usize, level: i64) -> impl Iterator<Item = Vec<S>> {
    let complex = S::imag_unit().is_some();
    let side = 2 * level + 1;
    let per = if complex { side * side } else { side };
    let total = (per as u128).pow(n as u32);
    (0..total).filter_map(move |mut idx| {
        let mut parts = Vec::with_capacity(n);
        for _ in 0..n {
            let digit = (idx % per as u128) as i64;
            idx /= per as u128;
            parts.push(if complex {
                (digit % side - level, digit / side - level)
            } else {
                (digit - level, 0)
            });
        }
        let top = parts.iter().map(|(a, b)| a.abs().max(b.abs())).max().unwrap_or(0);
        let first = parts.iter().find(|(a, b)| *a != 0 || *b != 0)?;
        if top != level || first.0 < 0 || (first.0 == 0 && first.1 < 0) {
            return None;
        }
        Some(
            parts
                .into_iter()
                .map(|(a, b)| {
                    let mut x = S::from_i64(a);
                    if let Some(i) = S::imag_unit() {
                        x = x + i * S::from_i64(b);
                    }
                    x
                })
                .collect(),
        )
    })
}

/// Constant `R` with `R* R = C` for a positive definite constant hermitian
/// `C`, built one row at a time from small vectors `x` whose value `x* C x`
/// is a norm.
pub fn constant_factor<S: Coeff>(c: &Matrix<S>, budget: &Budget) -> Result<Matrix<S>> {
    let n = c.rows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    if c.get(0, 0).is_zero() && n == 1 {
        return Err(Error::Degenerate);
    }
    let mut tried = 0usize;
    let mut hits = 0usize;
    for level in 1..=budget.constant_height {
        for x in shell::<S>(n, level) {
            tried += 1;
            if tried > budget.constant_candidates || hits > 16 {
                break;
            }
            let cx = c.mul(&Matrix::column(&x));
            let val = (0..n).fold(S::zero(), |acc, i| acc + x[i].conj() * cx.get(i, 0).clone());
            if !val.re().is_positive() {
                continue;
            }
            let Some(rho) = S::from_norm(&val.re()) else {
                continue;
            };
            hits += 1;
            let k = x.iter().position(|e| !e.is_zero()).expect("nonzero");
            let mut order: Vec<usize> = vec![k];
            order.extend((0..n).filter(|&j| j != k));
            let p = Matrix::from_fn(n, n, |i, j| {
                if j == 0 {
                    x[i].clone()
                } else if i == order[j] {
                    S::one()
                } else {
                    S::zero()
                }
            });
            let c2 = p.star().mul(c).mul(&p);
            let rinv = rho.conj().inv();
            let r: Vec<S> = (1..n).map(|j| c2.get(0, j).clone() * rinv.clone()).collect();
            let sub = Matrix::from_fn(n - 1, n - 1, |i, j| {
                c2.get(i + 1, j + 1).clone() - r[i].conj() * r[j].clone()
            });
            let Ok(rest) = constant_factor(&sub, budget) else {
                continue;
            };
            let lifted = Matrix::from_fn(n, n, |i, j| match (i, j) {
                (0, 0) => rho.clone(),
                (0, j) => r[j - 1].clone(),
                (_, 0) => S::zero(),
                (i, j) => rest.get(i - 1, j - 1).clone(),
            });
            let out = lifted.mul(&p.inverse().expect("invertible basis"));
            if out.gram() == *c {
                return Ok(out);
            }
        }
    }
    Err(Error::ConstantNotNorm(format!(
        "no constant factor of a {n}x{n} form within the search budget"
    )))
}

/// Index groups of equal invariant factors, in order of first appearance.
fn groups<S: Coeff>(factors: &[Poly<S>]) -> Vec<(Poly<S>, Vec<usize>)> {
    let mut out: Vec<(Poly<S>, Vec<usize>)> = Vec::new();
    for (i, a) in factors.iter().enumerate() {
        match out.iter_mut().find(|(b, _)| b == a) {
            Some((_, idx)) => idx.push(i),
            None => out.push((a.clone(), vec![i])),
        }
    }
    out
}

/// Polynomial `F` with `F* F = lambda a I` for one group of size `size`.
type GroupFactor<S> = (PolyMatrix<S>, Rat);

fn is_diagonal<S: Coeff>(f: &PolyMatrix<S>) -> bool {
    (0..f.rows()).all(|i| (0..f.cols()).all(|j| i == j || f.get(i, j).is_zero()))
}

/// Build `Q_D` with `Q_D* Q_D = diag(c_i a_i)` from per-group factors. When
/// every group factor is diagonal one constant `R` handles all constants at
/// once (`Q_D = R F`); otherwise each group gets its own (`F R_G`).
fn diagonal_factor<S: Coeff>(
    cw: &CongruenceWitness<S>,
    budget: &Budget,
    group_factor: impl Fn(&Poly<S>, usize) -> Result<GroupFactor<S>>,
) -> Result<PolyMatrix<S>> {
    let n = cw.factors.len();
    let parts = groups(&cw.factors)
        .into_iter()
        .map(|(a, idx)| Ok((group_factor(&a, idx.len())?, idx)))
        .collect::<Result<Vec<_>>>()?;
    let scaled = |idx: &[usize], lambda: &Rat| -> Matrix<S> {
        Matrix::diag(
            &idx.iter()
                .map(|&i| S::from_rat(cw.constants[i].clone() / lambda.clone()))
                .collect::<Vec<_>>(),
        )
    };
    if parts.iter().all(|((f, _), _)| is_diagonal(f)) {
        let mut f = PolyMatrix::<S>::zeros(n, n);
        let mut c = Matrix::<S>::zeros(n, n);
        for ((fg, lambda), idx) in &parts {
            let cg = scaled(idx, lambda);
            for (p, &i) in idx.iter().enumerate() {
                f.set(i, i, fg.get(p, p).clone());
                c.set(i, i, cg.get(p, p).clone());
            }
        }
        let r = constant_factor(&c, budget)?;
        return Ok(PolyMatrix::from_constant(&r).mul(&f));
    }
    let mut qd = PolyMatrix::<S>::zeros(n, n);
    for ((f, lambda), idx) in &parts {
        let r = constant_factor(&scaled(idx, lambda), budget)?;
        let block = f.mul(&PolyMatrix::from_constant(&r));
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                qd.set(i, j, block.get(p, q).clone());
            }
        }
    }
    Ok(qd)
}

/// Rational factorization `Q_D T^{-1}` followed by pole cancellation.
fn cancel<S: Coeff>(
    m: &PolyMatrix<S>,
    qd: &PolyMatrix<S>,
    cw: CongruenceWitness<S>,
    real: bool,
) -> Result<Traced<S>> {
    let tinv = cw.t.inverse().ok_or(Error::Degenerate)?;
    let s = qd.to_ratfn().mul(&tinv);
    let c = cancel_poles(&s.to_gauss(), real)?;
    let q = from_gauss::<S>(&c.q)?;
    let witness = Witness {
        congruence: Some(cw),
        cancellation: Some(c),
        ..Witness::default()
    };
    checked(q, m, witness)
}

fn real_det<S: Scalar>(m: &PolyMatrix<S>) -> Result<Poly<Rat>> {
    m.det().to_rat().ok_or(Error::NotHermitian)
}

fn complex_core(m: &PolyMatrix<Gauss>, seed: Option<&Poly<Gauss>>, budget: &Budget) -> Result<Traced<Gauss>> {
    match extraction_core(m, seed, budget) {
        Err(Error::RootsNotInField(s)) => Err(Error::RootsNotInField(s)),
        Err(_) => local_core(m, seed, budget),
        ok => ok,
    }
}

/// Roots of `det M` to move into `det Q`: one of each conjugate pair (the one
/// dividing `seed` when given, else the upper one) and half of each real root.
fn extraction_roots(d: &Poly<Rat>, seed: Option<&Poly<Gauss>>) -> Result<Vec<Gauss>> {
    let mut out = Vec::new();
    for r in gaussian_roots(d)? {
        let z = r.root;
        if z.im.is_zero() {
            out.extend(std::iter::repeat_n(z, r.multiplicity / 2));
        } else if z.im.is_positive() {
            let mut k = r.multiplicity;
            if let Some(g) = seed {
                let mut h = g.clone();
                k = 0;
                while let Some(q) = h.exact_div(&Poly::linear(z.clone())) {
                    h = q;
                    k += 1;
                }
                k = k.min(r.multiplicity);
            }
            out.extend(std::iter::repeat_n(z.clone(), k));
            out.extend(std::iter::repeat_n(z.conj(), r.multiplicity - k));
        }
    }
    Ok(out)
}

/// Square factorization by peeling one linear factor `t - w` per root of
/// `det M`: a constant congruence `E` with `E e_k` in the kernel of `M(w)`
/// makes row and column `k` divisible, leaving a unimodular core that degree
/// reduction turns constant.
fn extraction_core(m: &PolyMatrix<Gauss>, seed: Option<&Poly<Gauss>>, budget: &Budget) -> Result<Traced<Gauss>> {
    let n = m.rows();
    let mut cur = m.clone();
    let mut r = PolyMatrix::<Gauss>::identity(n);
    for w in extraction_roots(&real_det(m)?, seed)? {
        let at = cur.map(|f| f.eval(&w));
        let u = at
            .kernel()
            .into_iter()
            .next()
            .ok_or_else(|| Error::VerificationFailed("no kernel at a root of det M".into()))?;
        let k = (0..n).find(|&i| !u[i].is_zero()).expect("nonzero kernel vector");
        let e = Matrix::<Gauss>::from_fn(n, n, |i, j| {
            if j == k {
                u[i].clone()
            } else if i == j {
                Gauss::one()
            } else {
                Gauss::zero()
            }
        });
        let einv = PolyMatrix::from_constant(&e.inverse().expect("kernel completion"));
        let e = PolyMatrix::from_constant(&e);
        let next = e.star().mul(&cur).mul(&e);
        let col = Poly::linear(w.clone());
        let row = Poly::linear(w.conj());
        let both = &col * &row;
        let mut out = next.clone();
        for i in 0..n {
            for j in 0..n {
                let div = match (i == k, j == k) {
                    (true, true) => &both,
                    (false, true) => &col,
                    (true, false) => &row,
                    _ => continue,
                };
                let q = next
                    .get(i, j)
                    .exact_div(div)
                    .ok_or_else(|| Error::VerificationFailed("linear factor does not divide".into()))?;
                out.set(i, j, q);
            }
        }
        let mut dmat = PolyMatrix::<Gauss>::identity(n);
        dmat.set(k, k, col);
        r = dmat.mul(&einv).mul(&r);
        cur = out;
    }
    let (e, reduced) = reduce_degrees(&cur);
    let c = reduced
        .to_constant()
        .ok_or_else(|| Error::Indeterminate("unimodular core did not reduce to a constant".into()))?;
    let einv = e
        .to_ratfn()
        .inverse()
        .and_then(|x| x.to_poly())
        .ok_or_else(|| Error::VerificationFailed("degree reduction is not unimodular".into()))?;
    let rc = PolyMatrix::from_constant(&constant_factor(&c, budget)?);
    checked(rc.mul(&einv).mul(&r), m, Witness::default())
}

fn local_core(m: &PolyMatrix<Gauss>, seed: Option<&Poly<Gauss>>, budget: &Budget) -> Result<Traced<Gauss>> {
    let d = real_det(m)?;
    let cw = snf_congruence_with(m, &budget.local)?;
    let dm = d.monic().to_gauss();
    let qd = diagonal_factor(&cw, budget, |a, size| {
        let (h, lambda) = match seed {
            Some(g) if *a == dm => (g.clone(), d.lc()),
            _ => (scalar_fejer_riesz(a)?.as_complex(), Rat::one()),
        };
        Ok((PolyMatrix::identity(size).scale(&h), lambda))
    })?;
    cancel(m, &qd, cw, false)
}

/// Square factorization `Q* Q = M` over the Gaussian rationals.
pub fn complex_square_factor(m: &PolyMatrix<Gauss>) -> Result<Factorization<Gauss>> {
    Ok(complex_square_factor_traced(m, &Budget::default())?.factorization)
}

pub fn complex_square_factor_traced(m: &PolyMatrix<Gauss>, budget: &Budget) -> Result<Traced<Gauss>> {
    check_input(m)?;
    split_kernel(m, 0, |core| complex_core(core, None, budget))
}

/// `2x2` block `[[a, -b], [b, a]]` repeated `size / 2` times.
fn rotation_blocks(cls: &TwoSquares, size: usize) -> Result<PolyMatrix<Rat>> {
    let (a, b) = real_pair(cls);
    let c = Matrix::from_rows(vec![vec![a.clone(), -&b], vec![b, a]]);
    let mut out = PolyMatrix::<Rat>::zeros(0, 0);
    for _ in 0..size / 2 {
        out = out.direct_sum(&c);
    }
    Ok(out)
}

fn real_pair(cls: &TwoSquares) -> (Poly<Rat>, Poly<Rat>) {
    match cls {
        TwoSquares::Real { a, b, .. } => (a.clone(), b.clone()),
        TwoSquares::Complex { g, target } => real_pair(&TwoSquares::from_complex(g, target)),
    }
}

fn real_class_of(d: &Poly<Rat>) -> Result<TwoSquares> {
    let g = scalar_fejer_riesz(d)?.as_complex();
    Ok(TwoSquares::from_complex(&g, d))
}

fn real_nplus1_core(m: &PolyMatrix<Rat>, seed: Option<&TwoSquares>, budget: &Budget) -> Result<Traced<Rat>> {
    let n = m.rows();
    let d = m.det();
    if n == 1 {
        let cls = match seed {
            Some(c) => c.clone(),
            None => real_class_of(&d)?,
        };
        let (a, b) = real_pair(&cls);
        return checked(Matrix::column(&[a, b]), m, Witness::default());
    }
    let big = m.direct_sum(&Matrix::diag(&[d.clone()]));
    let cw = snf_congruence_with(&big, &budget.local)?;
    let dm = d.monic();
    let qd = diagonal_factor(&cw, budget, |a, size| {
        if a.is_one() {
            return Ok((PolyMatrix::identity(size), Rat::one()));
        }
        if let Some(h) = poly_sqrt(a) {
            return Ok((PolyMatrix::identity(size).scale(&h), Rat::one()));
        }
        if size % 2 == 1 {
            return Err(Error::Indeterminate(format!(
                "invariant factor {a} is not a square and occurs an odd number of times"
            )));
        }
        if *a == dm {
            let cls = match seed {
                Some(c) => c.clone(),
                None => real_class_of(&d)?,
            };
            Ok((rotation_blocks(&cls, size)?, d.lc()))
        } else {
            Ok((rotation_blocks(&real_class_of(a)?, size)?, Rat::one()))
        }
    })?;
    let full = cancel(&big, &qd, cw, true)?;
    let q = full.factorization.q.submatrix(&(0..=n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>());
    checked(q, m, full.witness)
}

fn check_real(m: &PolyMatrix<Rat>) -> Result<()> {
    check_input(m)
}

/// `(n+1) x n` factorization `Q^T Q = M` over the rationals.
pub fn real_nplus1_factor(m: &PolyMatrix<Rat>) -> Result<Factorization<Rat>> {
    Ok(real_nplus1_factor_traced(m, &Budget::default())?.factorization)
}

pub fn real_nplus1_factor_traced(m: &PolyMatrix<Rat>, budget: &Budget) -> Result<Traced<Rat>> {
    check_real(m)?;
    split_kernel(m, 1, |core| real_nplus1_core(core, None, budget))
}

fn real_square_core(m: &PolyMatrix<Rat>, budget: &Budget) -> Result<Traced<Rat>> {
    let n = m.rows();
    let d = m.det();
    let h = poly_sqrt(&d).ok_or(Error::DeterminantNotSquare)?;
    if n == 1 {
        return checked(Matrix::diag(&[h]), m, Witness::default());
    }
    let base = real_nplus1_core(m, None, budget)?;
    let q1 = base.factorization.q.to_ratfn();
    let v: Vec<RatFn<Rat>> = cauchy_binet_extend(&base.factorization.q)?
        .into_iter()
        .map(RatFn::from_poly)
        .collect();
    let mut last = Error::SearchExhausted("no reflection of the extension vector admits pole cancellation".into());
    for k in (0..=n).rev() {
        for sign in [1i64, -1] {
            let target: Vec<RatFn<Rat>> = (0..=n)
                .map(|i| {
                    if i == k {
                        RatFn::from_poly(h.scale(&Rat::from_integer(sign.into())))
                    } else {
                        RatFn::zero()
                    }
                })
                .collect();
            let u = if v == target {
                RatMatrix::identity(n + 1)
            } else {
                match reflection(&v, &target) {
                    Some(u) => u,
                    None => continue,
                }
            };
            let uq = u.mul(&q1);
            let rows: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
            if (0..n).any(|j| !uq.get(k, j).is_zero()) {
                continue;
            }
            let s = uq.submatrix(&rows, &(0..n).collect::<Vec<_>>());
            match cancel_poles(&s.to_gauss(), true) {
                Ok(c) => {
                    let q = from_gauss::<Rat>(&c.q)?;
                    let witness = Witness {
                        cancellation: Some(c),
                        reflection: Some(u),
                        ..base.witness
                    };
                    return checked(q, m, witness);
                }
                Err(e) => last = e,
            }
        }
    }
    Err(last)
}

/// Square factorization `Q^T Q = M` over the rationals; requires `det M` to
/// be a square in `Q[t]`.
pub fn real_square_factor(m: &PolyMatrix<Rat>) -> Result<Factorization<Rat>> {
    Ok(real_square_factor_traced(m, &Budget::default())?.factorization)
}

pub fn real_square_factor_traced(m: &PolyMatrix<Rat>, budget: &Budget) -> Result<Traced<Rat>> {
    check_real(m)?;
    split_kernel(m, 0, |core| real_square_core(core, budget))
}

/// One `(n+1) x n` factorization per `O(2)`-class of `det M`.
pub fn enumerate_real_classes(m: &PolyMatrix<Rat>, budget: &Budget) -> Result<Vec<ClassifiedFactorization<Rat>>> {
    check_real(m)?;
    let d = m.det();
    if d.is_zero() {
        return Err(Error::Degenerate);
    }
    let classes = enumerate_two_squares_real(&d)?;
    let out = classes
        .par_iter()
        .map(|cls| {
            let t = real_nplus1_core(m, Some(cls), budget)?;
            let v = cauchy_binet_extend(&t.factorization.q)?;
            Ok(ClassifiedFactorization {
                factorization: t.factorization,
                cls: cls.clone(),
                v: Some(v),
                compression: None,
                witness: t.witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    check_pairwise(&out, m)?;
    Ok(out)
}

/// One square factorization per `U(1)`-class of `det M`, with `det Q` in the
/// seeding class.
pub fn enumerate_complex_classes(
    m: &PolyMatrix<Gauss>,
    budget: &Budget,
) -> Result<Vec<ClassifiedFactorization<Gauss>>> {
    check_input(m)?;
    let d = real_det(m)?;
    if d.is_zero() {
        return Err(Error::Degenerate);
    }
    let classes = enumerate_complex_scalar_classes(&d)?;
    let out = classes
        .par_iter()
        .map(|cls| {
            let t = complex_core(m, Some(&cls.as_complex()), budget)?;
            let det = TwoSquares::Complex {
                g: t.factorization.q.det(),
                target: d.clone(),
            };
            if !u1_equivalent(&det, cls)? {
                return Err(Error::VerificationFailed("det Q left its seeding class".into()));
            }
            Ok(ClassifiedFactorization {
                factorization: t.factorization,
                cls: cls.clone(),
                v: None,
                compression: None,
                witness: t.witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    check_pairwise(&out, m)?;
    Ok(out)
}

fn check_pairwise<S: Coeff>(out: &[ClassifiedFactorization<S>], m: &PolyMatrix<S>) -> Result<()> {
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if equivalent_factorizations(&out[i].factorization.q, &out[j].factorization.q, m)? {
                return Err(Error::VerificationFailed(format!("classes {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

/// Rational points `(c, s)` on the unit circle with small parameter.
fn rotations(height: i64) -> Vec<(Rat, Rat)> {
    let mut out = vec![
        (Rat::one(), Rat::zero()),
        (Rat::zero(), Rat::one()),
        (-Rat::one(), Rat::zero()),
        (Rat::zero(), -Rat::one()),
    ];
    for q in 1..=height {
        for p in -height..=height {
            if p == 0 {
                continue;
            }
            let u = Rat::new(p.into(), q.into());
            let den = Rat::one() + &u * &u;
            let point = ((Rat::one() - &u * &u) / &den, (Rat::from_integer(2.into()) * &u) / &den);
            if !out.contains(&point) {
                out.push(point);
            }
        }
    }
    out
}

/// The two-squares class of a real `(n+1) x n` factorization, by reflecting
/// its Cauchy–Binet vector onto `(0, ..., 0, a, b)` over the semi-local ring
/// of `det M`, falling back to equivalence with `known` factorizations.
pub fn classify_factorization(
    q: &PolyMatrix<Rat>,
    m: &PolyMatrix<Rat>,
    known: Option<&[ClassifiedFactorization<Rat>]>,
    budget: &Budget,
) -> Result<ClassifiedFactorization<Rat>> {
    let factorization = verify_factorization(q, m)?;
    if !factorization.verified {
        return Err(Error::NotAFactorization);
    }
    let n = m.rows();
    if q.rows() != n + 1 {
        return Err(Error::ShapeUnsupported { rows: q.rows(), cols: q.cols() });
    }
    let d = m.det();
    let classes = enumerate_two_squares_real(&d)?;
    let v = cauchy_binet_extend(q)?;
    let ring = SemiLocalRing::new(&d)?;
    let vr: Vec<RatFn<Rat>> = v.iter().cloned().map(RatFn::from_poly).collect();
    for cls in &classes {
        let TwoSquares::Real { a, b, .. } = cls else { unreachable!() };
        for (c, s) in rotations(budget.rotation_height) {
            for flip in [false, true] {
                let b2 = if flip { -b } else { b.clone() };
                let ra = &a.scale(&c) - &b2.scale(&s);
                let rb = &a.scale(&s) + &b2.scale(&c);
                let mut target = vec![RatFn::zero(); n + 1];
                target[n - 1] = RatFn::from_poly(ra);
                target[n] = RatFn::from_poly(rb);
                let u = if vr == target {
                    RatMatrix::identity(n + 1)
                } else {
                    let w: Vec<RatFn<Rat>> = vr.iter().zip(&target).map(|(x, y)| x - y).collect();
                    let ww = w.iter().fold(RatFn::zero(), |acc, x| &acc + &(x * x));
                    if !ring.is_unit(&ww) {
                        continue;
                    }
                    match reflection(&vr, &target) {
                        Some(u) => u,
                        None => continue,
                    }
                };
                if u.entries().iter().all(|f| ring.contains(f)) {
                    return Ok(ClassifiedFactorization {
                        factorization,
                        cls: cls.clone(),
                        v: Some(v),
                        compression: Some(u),
                        witness: Witness::default(),
                    });
                }
            }
        }
    }
    for entry in known.unwrap_or(&[]) {
        if entry.factorization.q.rows() == q.rows() && equivalence_witness(&entry.factorization.q, q, m)?.is_some() {
            return Ok(ClassifiedFactorization {
                factorization,
                cls: entry.cls.clone(),
                v: Some(v),
                compression: None,
                witness: Witness::default(),
            });
        }
    }
    Err(Error::Indeterminate("no admissible compression of the extension vector within budget".into()))
}

/// The `U(1)`-class of `det Q` for a square complex factorization.
pub fn classify_complex_factorization(q: &PolyMatrix<Gauss>, m: &PolyMatrix<Gauss>) -> Result<ClassifiedFactorization<Gauss>> {
    let factorization = verify_factorization(q, m)?;
    if !factorization.verified {
        return Err(Error::NotAFactorization);
    }
    if !q.is_square() {
        return Err(Error::ShapeUnsupported { rows: q.rows(), cols: q.cols() });
    }
    let d = real_det(m)?;
    let det = TwoSquares::Complex { g: q.det(), target: d.clone() };
    for cls in enumerate_complex_scalar_classes(&d)? {
        if u1_equivalent(&det, &cls)? {
            return Ok(ClassifiedFactorization {
                factorization,
                cls,
                v: None,
                compression: None,
                witness: Witness::default(),
            });
        }
    }
    Err(Error::VerificationFailed("det Q matches no scalar class".into()))
}

/// Same `O(2)`-class test used for labels.
pub fn same_real_class(s1: &TwoSquares, s2: &TwoSquares) -> Result<bool> {
    o2_equivalent(s1, s2)
}

/// Dimension of the span of the coefficient vectors of `v`: a constant
/// unitary can move `v` into `k` coordinates exactly when this is at most `k`.
pub fn constant_support_rank<S: Coeff>(v: &[Poly<S>]) -> usize {
    let len = v.iter().filter_map(Poly::degree).max().map_or(0, |d| d + 1);
    if len == 0 {
        return 0;
    }
    Matrix::from_fn(v.len(), len, |i, k| v[i].coeff(k)).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gi;

    type P = Poly<Rat>;

    fn pm(rows: Vec<Vec<&[i64]>>) -> PolyMatrix<Rat> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(P::from_i64s).collect()).collect())
    }

    #[test]
    fn constant_factors() {
        let b = Budget::default();
        let c = Matrix::diag(&[Rat::from_integer(2.into()), Rat::from_integer(2.into())]);
        let r = constant_factor(&c, &b).unwrap();
        assert_eq!(r.gram(), c);
        let c = Matrix::diag(&[Rat::from_integer(3.into()), Rat::from_integer(3.into())]);
        assert!(matches!(constant_factor(&c, &b), Err(Error::ConstantNotNorm(_))));
        let c = Matrix::diag(&[gi(3, 0), gi(3, 0)]);
        assert_eq!(constant_factor(&c, &b).unwrap().gram(), c);
    }

    #[test]
    fn complex_examples() {
        let id = PolyMatrix::<Gauss>::identity(2);
        assert_eq!(complex_square_factor(&id).unwrap().q.gram(), id);
        let m = Matrix::diag(&[Poly::<Gauss>::from_i64s(&[1, 0, 1])]);
        let q = complex_square_factor(&m).unwrap().q;
        assert_eq!(q.get(0, 0).monic(), Poly::linear(gi(0, 1)));

        let g = &Poly::linear(gi(0, 1)) * &Poly::linear(gi(0, 2));
        let q0 = Matrix::from_rows(vec![vec![g, Poly::t()], vec![Poly::zero(), Poly::one()]]);
        let m = q0.gram();
        let q = complex_square_factor(&m).unwrap().q;
        assert!(equivalent_factorizations(&q, &q0, &m).unwrap());
    }

    #[test]
    fn real_examples() {
        let m = pm(vec![vec![&[1, 0, 1]]]);
        assert_eq!(real_nplus1_factor(&m).unwrap().q, pm(vec![vec![&[0, 1]], vec![&[1]]]));
        assert_eq!(real_square_factor(&m), Err(Error::DeterminantNotSquare));

        let m = pm(vec![vec![&[1], &[0, 1]], vec![&[0, 1], &[4, 0, 6, 0, 1]]]);
        let f = real_nplus1_factor(&m).unwrap();
        assert!(f.verified && f.q.rows() == 3);

        let m = pm(vec![vec![&[1, 0, 1], &[0, 1]], vec![&[0, 1], &[1]]]);
        assert!(real_square_factor(&m).unwrap().verified);
        let m = pm(vec![vec![&[0, 0, 1]]]);
        assert_eq!(real_square_factor(&m).unwrap().q, pm(vec![vec![&[0, 1]]]));
    }

    #[test]
    fn degenerate_input_splits_kernel() {
        let q0 = pm(vec![vec![&[1], &[0, 1]], vec![&[0, 1], &[0, 0, 1]]]);
        let m = q0.transpose().mul(&q0);
        assert!(m.det().is_zero());
        let t = real_nplus1_factor_traced(&m, &Budget::default()).unwrap();
        assert!(t.factorization.verified);
        assert!(t.witness.kernel_basis.is_some());
    }

    #[test]
    fn real_enumeration_and_classification() {
        let m = pm(vec![vec![&[1], &[0, 1]], vec![&[0, 1], &[4, 0, 6, 0, 1]]]);
        let b = Budget::default();
        let all = enumerate_real_classes(&m, &b).unwrap();
        assert_eq!(all.len(), 2);
        let planted = pm(vec![vec![&[1], &[0, 1]], vec![&[], &[-2, 0, 1]], vec![&[], &[0, 3]]]);
        let c = classify_factorization(&planted, &m, Some(&all), &b).unwrap();
        let expect = TwoSquares::Real {
            a: P::from_i64s(&[-2, 0, 1]),
            b: P::from_i64s(&[0, 3]),
            target: m.det(),
        };
        assert!(same_real_class(&c.cls, &expect).unwrap());
        for e in &all {
            let back = classify_factorization(&e.factorization.q, &m, Some(&all), &b).unwrap();
            assert!(same_real_class(&back.cls, &e.cls).unwrap());
        }
        let sq = pm(vec![vec![&[1, 0, 2, 0, 1]]]);
        assert_eq!(enumerate_real_classes(&sq, &b).map(|v| v.len()), Err(Error::NotSquareFree));
    }

    #[test]
    fn complex_enumeration() {
        let m = Matrix::diag(&[Poly::<Gauss>::from_i64s(&[1, 0, 1])]);
        assert_eq!(enumerate_complex_classes(&m, &Budget::default()).unwrap().len(), 2);
        let g = &Poly::linear(gi(0, 1)) * &Poly::linear(gi(0, 2));
        let q0 = Matrix::from_rows(vec![vec![g, Poly::t()], vec![Poly::zero(), Poly::one()]]);
        let all = enumerate_complex_classes(&q0.gram(), &Budget::default()).unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn paper_vector_is_not_constant_compressible() {
        let q = pm(vec![vec![&[1], &[]], vec![&[], &[1]], vec![&[0, 1], &[0, 0, 1]]]);
        let v = cauchy_binet_extend(&q).unwrap();
        let expect = vec![P::from_i64s(&[0, -1]), P::from_i64s(&[0, 0, -1]), P::one()];
        assert!(v == expect || v.iter().map(|p| -p).collect::<Vec<_>>() == expect);
        assert_eq!(constant_support_rank(&v), 3);
    }
}
