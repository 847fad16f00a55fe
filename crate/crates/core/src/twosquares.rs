//! Scalar Fejér–Riesz factorization and sum-of-two-squares classes.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::roots::{gaussian_roots, is_squarefree, psd_check, RootDatum};
use crate::scalar::{norm_preimage, Gauss, Rat, Scalar};

/// A representation of `target` as `a^2 + b^2` (real kind) or `g* g`
/// (complex kind).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoSquares {
    Real {
        a: Poly<Rat>,
        b: Poly<Rat>,
        target: Poly<Rat>,
    },
    Complex {
        g: Poly<Gauss>,
        target: Poly<Rat>,
    },
}

impl TwoSquares {
    pub fn target(&self) -> &Poly<Rat> {
        match self {
            TwoSquares::Real { target, .. } | TwoSquares::Complex { target, .. } => target,
        }
    }

    /// `a + i b` for the real kind, `g` for the complex kind.
    pub fn as_complex(&self) -> Poly<Gauss> {
        match self {
            TwoSquares::Real { a, b, .. } => {
                let ib = b.to_gauss().scale(&Gauss::new(Rat::zero(), Rat::one()));
                &a.to_gauss() + &ib
            }
            TwoSquares::Complex { g, .. } => g.clone(),
        }
    }

    /// Exact check of the defining identity.
    pub fn holds(&self) -> bool {
        match self {
            TwoSquares::Real { a, b, target } => &(a * a) + &(b * b) == *target,
            TwoSquares::Complex { g, target } => &g.star() * g == target.to_gauss(),
        }
    }

    /// Real pair `(Re g, -Im g)` of a complex representation.
    pub fn from_complex(g: &Poly<Gauss>, target: &Poly<Rat>) -> TwoSquares {
        let a = Poly::new(g.coeffs().iter().map(|c| c.re.clone()).collect());
        let b = Poly::new(g.coeffs().iter().map(|c| -c.im.clone()).collect());
        TwoSquares::Real {
            a,
            b,
            target: target.clone(),
        }
    }
}

struct ScalarRoots {
    lead: Gauss,
    real: Vec<RootDatum>,
    upper: Vec<RootDatum>,
}

fn split_roots<S: Scalar>(d: &Poly<S>) -> Result<(Poly<Rat>, ScalarRoots)> {
    let d = d.to_rat().ok_or(Error::NonRealInput)?;
    if d.is_zero() || !psd_check(&d)? {
        return Err(Error::NotPsd);
    }
    let lead = norm_preimage(&d.lc())?;
    let roots = if d.is_constant() {
        Vec::new()
    } else {
        gaussian_roots(&d)?
    };
    let (real, rest): (Vec<_>, Vec<_>) = roots.into_iter().partition(|r| r.root.im.is_zero());
    let upper = rest.into_iter().filter(|r| r.root.im.is_positive()).collect();
    Ok((d, ScalarRoots { lead, real, upper }))
}

fn build(roots: &ScalarRoots, mask: u64) -> Poly<Gauss> {
    let mut g = Poly::constant(roots.lead.clone());
    for r in &roots.real {
        for _ in 0..r.multiplicity / 2 {
            g = &g * &Poly::linear(r.root.clone());
        }
    }
    for (j, r) in roots.upper.iter().enumerate() {
        let z = if mask >> j & 1 == 0 {
            r.root.clone()
        } else {
            r.root.conj()
        };
        for _ in 0..r.multiplicity {
            g = &g * &Poly::linear(z.clone());
        }
    }
    g
}

/// `g` with `g* g = d`, taking the root with positive imaginary part from
/// every conjugate pair.
pub fn scalar_fejer_riesz<S: Scalar>(d: &Poly<S>) -> Result<TwoSquares> {
    let (d, roots) = split_roots(d)?;
    let g = build(&roots, 0);
    Ok(TwoSquares::Complex { g, target: d })
}

fn squarefree_roots<S: Scalar>(d: &Poly<S>) -> Result<(Poly<Rat>, ScalarRoots)> {
    let (d, roots) = split_roots(d)?;
    if !d.is_constant() && !is_squarefree(&d) {
        return Err(Error::NotSquareFree);
    }
    if roots.upper.len() >= 63 {
        return Err(Error::BudgetExhausted("too many conjugate root pairs".into()));
    }
    Ok((d, roots))
}

/// One representative per U(1)-class of `g* g = d`. Bit `j` of the class
/// index selects the conjugate of the `j`-th root in the upper half plane.
pub fn enumerate_complex_scalar_classes<S: Scalar>(d: &Poly<S>) -> Result<Vec<TwoSquares>> {
    let (d, roots) = squarefree_roots(d)?;
    let count = 1u64 << roots.upper.len();
    Ok((0..count)
        .into_par_iter()
        .map(|mask| TwoSquares::Complex {
            g: build(&roots, mask),
            target: d.clone(),
        })
        .collect())
}

/// One representative per O(2)-class of `a^2 + b^2 = d`: the complex
/// classes whose last pair choice is fixed, since total conjugation merges
/// the remaining ones in pairs.
pub fn enumerate_two_squares_real<S: Scalar>(d: &Poly<S>) -> Result<Vec<TwoSquares>> {
    let (d, roots) = squarefree_roots(d)?;
    let k = roots.upper.len();
    let count = if k == 0 { 1 } else { 1u64 << (k - 1) };
    Ok((0..count)
        .into_par_iter()
        .map(|mask| TwoSquares::from_complex(&build(&roots, mask), &d))
        .collect())
}

/// `Some(c)` if `q = c p` for a constant `c`.
pub(crate) fn constant_ratio(p: &Poly<Gauss>, q: &Poly<Gauss>) -> Option<Gauss> {
    if p.is_zero() {
        return q.is_zero().then(Gauss::one);
    }
    if p.degree() != q.degree() {
        return None;
    }
    let c = q.lc() / p.lc();
    (p.scale(&c) == *q).then_some(c)
}

fn unit_ratio(p: &Poly<Gauss>, q: &Poly<Gauss>) -> bool {
    constant_ratio(p, q).is_some_and(|c| c.norm_sqr().is_one())
}

/// Constant rotation or reflection maps `s1` to `s2`.
pub fn o2_equivalent(s1: &TwoSquares, s2: &TwoSquares) -> Result<bool> {
    if s1.target() != s2.target() {
        return Err(Error::TargetMismatch);
    }
    let (g1, g2) = (s1.as_complex(), s2.as_complex());
    Ok(unit_ratio(&g1, &g2) || unit_ratio(&g1.star(), &g2))
}

/// A norm-one constant maps `s1` to `s2`.
pub fn u1_equivalent(s1: &TwoSquares, s2: &TwoSquares) -> Result<bool> {
    if s1.target() != s2.target() {
        return Err(Error::TargetMismatch);
    }
    Ok(unit_ratio(&s1.as_complex(), &s2.as_complex()))
}
