//! Square-free decomposition, Sturm counting, positivity, and exact root
//! extraction in Q(i).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{gauss_cmp, gauss_sqrt, Gauss, Rat, Scalar};

/// A root together with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    pub root: Gauss,
    pub multiplicity: usize,
}

/// Yun's algorithm: returns `[(f_1, 1), (f_2, 2), ...]` with monic square-free,
/// pairwise coprime `f_i` such that `p = lc(p) * prod f_i^i`. Trivial factors
/// are omitted.
pub fn squarefree_decomposition<S: Scalar>(p: &Poly<S>) -> Vec<(Poly<S>, usize)> {
    let mut out = Vec::new();
    if p.is_zero() || p.is_constant() {
        return out;
    }
    let f = p.monic();
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.exact_div(&a0).unwrap();
    let mut c = df.exact_div(&a0).unwrap();
    let mut d = &c - &b.derivative();
    let mut i = 1;
    loop {
        let a = b.gcd(&d);
        if !a.is_one() {
            out.push((a.clone(), i));
        }
        b = b.exact_div(&a).unwrap();
        if b.is_constant() {
            break;
        }
        c = d.exact_div(&a).unwrap();
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

/// Monic product of the distinct irreducible factors.
pub fn squarefree_part<S: Scalar>(p: &Poly<S>) -> Poly<S> {
    if p.is_zero() {
        return Poly::zero();
    }
    let g = p.gcd(&p.derivative());
    p.exact_div(&g).unwrap().monic()
}

pub fn is_squarefree<S: Scalar>(p: &Poly<S>) -> bool {
    !p.is_zero() && p.gcd(&p.derivative()).is_one()
}

fn sign_at_infinity(p: &Poly<Rat>, positive: bool) -> i32 {
    let lc = p.lc();
    let s = if lc.is_positive() { 1 } else { -1 };
    match p.degree() {
        Some(d) if !positive && d % 2 == 1 => -s,
        _ => s,
    }
}

/// Number of distinct real roots of a nonzero real polynomial (Sturm).
pub fn count_real_roots(p: &Poly<Rat>) -> usize {
    if p.is_zero() || p.is_constant() {
        return 0;
    }
    let f = squarefree_part(p);
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        seq.push(-r);
    }
    let changes = |pos: bool| {
        let signs: Vec<i32> = seq.iter().map(|q| sign_at_infinity(q, pos)).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(false) - changes(true)
}

/// `p(x) >= 0` for every real `x`.
///
/// Decided exactly: `p = 0`, or `p` has positive leading coefficient and
/// the product of its odd-multiplicity square-free factors has no real root.
pub fn psd_check<S: Scalar>(p: &Poly<S>) -> Result<bool> {
    let p = p.to_rat().ok_or(Error::NonRealInput)?;
    if p.is_zero() {
        return Ok(true);
    }
    if !p.lc().is_positive() || p.degree().unwrap() % 2 == 1 {
        return Ok(false);
    }
    let odd = squarefree_decomposition(&p)
        .into_iter()
        .filter(|(_, m)| m % 2 == 1)
        .fold(Poly::one(), |acc, (f, _)| &acc * &f);
    Ok(count_real_roots(&odd) == 0)
}

/// Exact polynomial square root with leading coefficient a square in `S`
/// (positive root for rationals), if `p` is a perfect square.
pub fn poly_sqrt<S: Scalar>(p: &Poly<S>) -> Option<Poly<S>> {
    if p.is_zero() {
        return Some(Poly::zero());
    }
    let deg = p.degree()?;
    if deg % 2 == 1 {
        return None;
    }
    let m = deg / 2;
    let lead = p.lc().sqrt()?;
    let mut q = vec![S::zero(); m + 1];
    q[m] = lead.clone();
    let two_lead = lead.clone() + lead;
    // coefficient of t^(m+k) in q^2 determines q_k, for k = m-1 down to 0
    for k in (0..m).rev() {
        let mut acc = p.coeff(m + k);
        for i in (k + 1)..m {
            acc = acc - q[i].clone() * q[m + k - i].clone();
        }
        q[k] = acc / two_lead.clone();
    }
    let q = Poly::new(q);
    (&q * &q == *p).then_some(q)
}

/// Clear denominators of a Gaussian polynomial, returning Gaussian-integer
/// coefficients as (re, im) pairs.
fn gaussian_integer_coeffs(p: &Poly<Gauss>) -> Vec<(BigInt, BigInt)> {
    let mut l = BigInt::one();
    for c in p.coeffs() {
        l = l.lcm(c.re.denom());
        l = l.lcm(c.im.denom());
    }
    let lr = Rat::from_integer(l);
    p.coeffs()
        .iter()
        .map(|c| {
            (
                (&c.re * &lr).to_integer(),
                (&c.im * &lr).to_integer(),
            )
        })
        .collect()
}

/// Aberth-Ehrlich iteration in double precision; returns approximate roots.
pub(crate) fn aberth_f64(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lc = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lc).collect();
    let radius = 1.0
        + monic[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius * 0.5 + 0.1, ang)
        })
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Exact roots among the points of `lead^-1 Z[i]` next to each approximation.
fn lattice_hits(f: &Poly<Gauss>, lead: &Gauss, zs: impl Iterator<Item = Gauss>) -> Vec<Gauss> {
    let mut found: Vec<Gauss> = Vec::new();
    for z in zs {
        // lead*z is a Gaussian integer for every Gaussian rational root
        let wz = lead * &z;
        let (cr, ci) = (wz.re.round().to_integer(), wz.im.round().to_integer());
        'outer: for dr in [0i32, -1, 1] {
            for di in [0i32, -1, 1] {
                let w = Gauss::new(
                    Rat::from_integer(&cr + BigInt::from(dr)),
                    Rat::from_integer(&ci + BigInt::from(di)),
                );
                let cand = w / lead.clone();
                if f.eval(&cand).is_zero() {
                    if !found.contains(&cand) {
                        found.push(cand);
                    }
                    break 'outer;
                }
            }
        }
    }
    found
}

/// True when some double-precision root's inclusion disc, widened by a
/// large safety factor, contains no point of `lead^-1 Z[i]`.
fn seeds_rule_out_lattice(coeffs: &[Complex64], zs: &[Complex64]) -> bool {
    let n = zs.len();
    let lead = coeffs[n];
    if !coeffs.iter().all(|c| c.is_finite()) || !zs.iter().all(|z| z.is_finite()) {
        return false;
    }
    zs.iter().enumerate().any(|(i, &z)| {
        let p = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
        let prod = zs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(lead, |acc, (_, &w)| acc * (z - w));
        if prod.norm() == 0.0 {
            return false;
        }
        let radius = n as f64 * p.norm() / prod.norm();
        let w = lead * z;
        let gap = (w.re - w.re.round()).abs().hypot((w.im - w.im.round()).abs());
        let slack = 1e3 * lead.norm() * radius + 1e-6 * (1.0 + w.norm());
        slack < gap
    })
}

/// Exact roots in Q(i) of a square-free polynomial, or `None` if some root
/// is not Gaussian rational.
fn squarefree_gaussian_roots(f: &Poly<Gauss>) -> Option<Vec<Gauss>> {
    let deg = f.degree()?;
    match deg {
        0 => return Some(Vec::new()),
        1 => return Some(vec![-(f.coeff(0) / f.coeff(1))]),
        2 => {
            let (a, b, c) = (f.coeff(2), f.coeff(1), f.coeff(0));
            let disc = b.clone() * b.clone() - Gauss::from_i64(4) * a.clone() * c;
            let s = gauss_sqrt(&disc)?;
            let two_a = a.clone() + a;
            let mut rs = vec![(-b.clone() + s.clone()) / two_a.clone(), (-b - s) / two_a];
            rs.sort_by(gauss_cmp);
            return Some(rs);
        }
        _ => {}
    }
    let ints = gaussian_integer_coeffs(f);
    let lead = {
        let (r, i) = &ints[deg];
        Gauss::new(Rat::from_integer(r.clone()), Rat::from_integer(i.clone()))
    };
    let approx: Vec<Complex64> = ints
        .iter()
        .map(|(r, i)| Complex64::new(r.to_f64().unwrap_or(f64::NAN), i.to_f64().unwrap_or(f64::NAN)))
        .collect();
    let seeds = aberth_f64(&approx);
    let direct = lattice_hits(f, &lead, seeds.iter().map(|z| crate::approx::from_c64(*z)));
    if direct.len() == deg {
        let mut found = direct;
        found.sort_by(gauss_cmp);
        return Some(found);
    }
    if seeds_rule_out_lattice(&approx, &seeds) {
        return None;
    }
    let zs = crate::approx::refine_roots(f, &seeds, 192);
    let mut found = lattice_hits(f, &lead, zs.into_iter());
    if found.len() != deg {
        return None;
    }
    found.sort_by(gauss_cmp);
    Some(found)
}

/// Full multiset of roots of `p` in Q(i).
pub fn gaussian_roots<S: Scalar>(p: &Poly<S>) -> Result<Vec<RootDatum>> {
    if p.is_zero() {
        return Err(Error::PreconditionViolated("roots of the zero polynomial".into()));
    }
    let g = p.to_gauss();
    let mut out = Vec::new();
    for (f, m) in squarefree_decomposition(&g) {
        let rs = squarefree_gaussian_roots(&f)
            .ok_or_else(|| Error::RootsNotInField(format!("{f}")))?;
        out.extend(rs.into_iter().map(|root| RootDatum {
            root,
            multiplicity: m,
        }));
    }
    out.sort_by(|a, b| gauss_cmp(&a.root, &b.root));
    Ok(out)
}

/// Irreducible monic factor over the base field, with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseFactor {
    pub factor: Poly<Gauss>,
    pub multiplicity: usize,
    /// The root used for split-off: the factor's only root (linear) or the
    /// one with positive imaginary part (real quadratic).
    pub root: Gauss,
}

/// Factor `p` into irreducibles over Q (`real = true`, linear and quadratic
/// factors) or over Q(i) (linear factors), provided all roots lie in Q(i).
/// Sorted by degree, then by coefficients lowest degree first.
pub fn factor_over_base<S: Scalar>(p: &Poly<S>, real: bool) -> Result<Vec<BaseFactor>> {
    if real && !p.is_real() {
        return Err(Error::NonRealInput);
    }
    let roots = gaussian_roots(p)?;
    let mut out = Vec::new();
    for r in roots {
        if real && !r.root.im.is_zero() {
            if r.root.im.is_negative() {
                continue;
            }
            let z = r.root.clone();
            let f = &Poly::linear(z.clone()) * &Poly::linear(z.conj());
            out.push(BaseFactor {
                factor: f,
                multiplicity: r.multiplicity,
                root: z,
            });
        } else {
            out.push(BaseFactor {
                factor: Poly::linear(r.root.clone()),
                multiplicity: r.multiplicity,
                root: r.root,
            });
        }
    }
    out.sort_by(|a, b| {
        a.factor
            .degree()
            .cmp(&b.factor.degree())
            .then_with(|| cmp_coeffs(&a.factor, &b.factor))
    });
    Ok(out)
}

pub(crate) fn cmp_coeffs(a: &Poly<Gauss>, b: &Poly<Gauss>) -> std::cmp::Ordering {
    for k in 0..a.coeffs().len().max(b.coeffs().len()) {
        let o = gauss_cmp(&a.coeff(k), &b.coeff(k));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// The part of `p` supported on the prime factors of `modulus`, monic.
pub fn modulus_part<S: Scalar>(p: &Poly<S>, modulus: &Poly<S>) -> Poly<S> {
    let mut rest = p.clone();
    let mut part = Poly::one();
    loop {
        let g = rest.gcd(modulus);
        if g.is_one() || g.is_zero() {
            break;
        }
        rest = rest.exact_div(&g).unwrap();
        part = &part * &g;
    }
    part.monic()
}
