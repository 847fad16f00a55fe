//! Elements of `K(t)(sqrt c)` and norm-preserving denominator clearing.

use num_traits::{One, Signed, Zero};

use super::SemiLocalRing;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::roots::{count_real_roots, factor_over_base, is_squarefree, modulus_part};
use crate::scalar::{gauss_sqrt, rat_sqrt, Gauss, Rat, Scalar};

/// `u + v sqrt(c)` with `c` square-free.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadExtElem {
    pub u: RatFn<Rat>,
    pub v: RatFn<Rat>,
    pub c: Poly<Rat>,
}

impl QuadExtElem {
    pub fn new(u: RatFn<Rat>, v: RatFn<Rat>, c: Poly<Rat>) -> Self {
        QuadExtElem { u, v, c }
    }

    pub fn conj(&self) -> Self {
        QuadExtElem::new(self.u.clone(), -&self.v, self.c.clone())
    }

    /// `u^2 - c v^2`.
    pub fn norm(&self) -> RatFn<Rat> {
        let c = RatFn::from_poly(self.c.clone());
        &(&self.u * &self.u) - &(&c * &(&self.v * &self.v))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let c = RatFn::from_poly(self.c.clone());
        QuadExtElem::new(
            &(&self.u * &rhs.u) + &(&c * &(&self.v * &rhs.v)),
            &(&self.u * &rhs.v) + &(&self.v * &rhs.u),
            self.c.clone(),
        )
    }

    pub fn scale(&self, k: &RatFn<Rat>) -> Self {
        QuadExtElem::new(&self.u * k, &self.v * k, self.c.clone())
    }

    /// Membership in `A[e sqrt c]` for the ring `A`.
    pub fn in_order(&self, ring: &SemiLocalRing<Rat>, e: &Poly<Rat>) -> bool {
        let ev = &self.v / &RatFn::from_poly(e.clone());
        ring.contains(&self.u) && ring.contains(&ev)
    }
}

type Series = Vec<Gauss>;

fn ser_mul(a: &[Gauss], b: &[Gauss], n: usize) -> Series {
    let mut out = vec![Gauss::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] = &out[i + j] + x * y;
        }
    }
    out
}

fn ser_inv(a: &[Gauss], n: usize) -> Series {
    let a0 = a[0].inv();
    let mut out = vec![Gauss::zero(); n];
    out[0] = a0.clone();
    for k in 1..n {
        let mut acc = Gauss::zero();
        for i in 1..=k.min(a.len() - 1) {
            acc = acc + &a[i] * &out[k - i];
        }
        out[k] = -(acc * &a0);
    }
    out
}

/// Series square root with prescribed constant term `r0`, `r0^2 = a[0]`.
fn ser_sqrt(a: &[Gauss], n: usize, r0: Gauss) -> Series {
    let mut out = vec![Gauss::zero(); n];
    out[0] = r0;
    let two0 = &out[0] * Gauss::from_i64(2);
    for k in 1..n {
        let mut acc = a.get(k).cloned().unwrap_or_else(Gauss::zero);
        for i in 1..k {
            acc = acc - &out[i] * &out[k - i];
        }
        out[k] = acc / &two0;
    }
    out
}

fn padded(p: &Poly<Gauss>, n: usize) -> Series {
    (0..n).map(|k| p.coeff(k)).collect()
}

/// Taylor coefficients of `f` at `z`, first `n` terms.
fn taylor(f: &RatFn<Rat>, z: &Gauss, n: usize) -> Series {
    let num = padded(&f.num().to_gauss().taylor_shift(z), n);
    let den = padded(&f.den().to_gauss().taylor_shift(z), n);
    ser_mul(&num, &ser_inv(&den, n), n)
}

fn conj_series(a: &[Gauss]) -> Series {
    a.iter().map(|c| c.conj()).collect()
}

/// Polynomial in `t` agreeing with the series in `t - z`.
fn to_poly(a: &[Gauss], z: &Gauss) -> Poly<Gauss> {
    Poly::new(a.to_vec()).taylor_shift(&-z.clone())
}

/// Chinese remaindering of `x = r_j mod m_j` over coprime moduli.
fn crt(pairs: &[(Poly<Gauss>, Poly<Gauss>)]) -> Poly<Gauss> {
    let mut x = Poly::zero();
    let mut m = Poly::one();
    for (r, mj) in pairs {
        let (_, s, _) = m.xgcd(mj);
        // s m = 1 mod mj
        let k = (&(r - &x) * &s).div_rem(mj).1;
        x = &x + &(&m * &k);
        m = &m * mj;
    }
    x.div_rem(&m).1
}

fn residue_error(what: String) -> Error {
    Error::ResidueFieldNotQuadraticallyClosed(what)
}

fn valuation_poly(p: &Poly<Rat>, prime: &Poly<Rat>) -> usize {
    let mut p = p.clone();
    let mut k = 0;
    while let Some(q) = p.exact_div(prime) {
        p = q;
        k += 1;
    }
    k
}

/// Given `gamma` with unit norm, return `alpha` in `A[e sqrt c]` with the
/// same norm. `c` must be negative definite and square-free; the residue
/// fields met along the way must admit the needed square roots in Q(i).
pub fn clear_norm_denominators(
    gamma: &QuadExtElem,
    ring: &SemiLocalRing<Rat>,
    e: &Poly<Rat>,
) -> Result<QuadExtElem> {
    let c = &gamma.c;
    if c.is_zero() || !is_squarefree(c) {
        return Err(Error::PreconditionViolated("discriminant must be square-free".into()));
    }
    if !c.lc().is_negative() || count_real_roots(c) > 0 {
        return Err(residue_error(format!("{c} is not negative definite")));
    }
    if !ring.is_unit(&gamma.norm()) {
        return Err(Error::NormNotUnit);
    }
    if !ring.contains(&gamma.u) || !ring.contains(&gamma.v) {
        return Err(Error::PreconditionViolated("gamma is not integral".into()));
    }
    if e.is_zero() || modulus_part(e, ring.modulus()) != e.monic() && !e.is_constant() {
        return Err(Error::PreconditionViolated("e must be supported on the modulus".into()));
    }
    if gamma.in_order(ring, e) {
        return Ok(gamma.clone());
    }
    let mut eu = Vec::new();
    let mut ev = Vec::new();
    for f in factor_over_base(ring.modulus(), true)? {
        let z = f.root.clone();
        let prime = f.factor.to_rat().expect("real prime");
        let n = valuation_poly(e, &prime);
        let len = n.max(1);
        let cz = c.to_gauss().taylor_shift(&z);
        let c0 = cz.coeff(0);
        let s0 = gauss_sqrt(&c0).ok_or_else(|| residue_error(format!("sqrt({c0}) at {z}")))?;
        let sigma = ser_sqrt(&padded(&cz, len), len, s0);
        let (su, sv) = if n == 0 {
            (vec![Gauss::one()], vec![Gauss::zero()])
        } else {
            let u = taylor(&gamma.u, &z, len);
            let v = taylor(&gamma.v, &z, len);
            let vs = ser_mul(&v, &sigma, len);
            let plus: Series = u.iter().zip(&vs).map(|(a, b)| a + b).collect();
            let minus: Series = u.iter().zip(&vs).map(|(a, b)| a - b).collect();
            let two_sigma_inv = ser_inv(&sigma.iter().map(|x| x * Gauss::from_i64(2)).collect::<Vec<_>>(), len);
            if z.im.is_zero() {
                // the two places are conjugate: rho^2 = kappa conj(w), kappa real
                let w0 = plus[0].clone();
                let m = rat_sqrt(&w0.norm_sqr()).ok_or_else(|| residue_error(format!("|{w0}| at {z}")))?;
                let rho0 = if w0.im.is_zero() {
                    Gauss::one()
                } else {
                    let mut r = (&w0.re + &m) / &w0.im;
                    if r.is_zero() {
                        r = (&w0.re - &m) / &w0.im;
                    }
                    Gauss::new(r, Rat::one())
                };
                let kappa = &rho0 * &rho0 / w0.conj();
                let target: Series = conj_series(&plus).iter().map(|x| x * &kappa).collect();
                let rho = ser_sqrt(&target, len, rho0);
                let rho_bar = conj_series(&rho);
                let re: Series = rho.iter().zip(&rho_bar).map(|(a, b)| (a + b) / Gauss::from_i64(2)).collect();
                let diff: Series = rho.iter().zip(&rho_bar).map(|(a, b)| a - b).collect();
                (re, ser_mul(&diff, &two_sigma_inv, len))
            } else {
                let ratio = ser_mul(&minus, &ser_inv(&plus, len), len);
                let l0 = gauss_sqrt(&ratio[0]).ok_or_else(|| residue_error(format!("sqrt({}) at {z}", ratio[0])))?;
                let lambda = ser_sqrt(&ratio, len, l0);
                let half = Gauss::new(Rat::new(1.into(), 2.into()), Rat::zero());
                let u_part: Series = lambda.iter().enumerate().map(|(k, l)| if k == 0 { (l + Gauss::one()) * &half } else { l * &half }).collect();
                let lm: Series = lambda.iter().enumerate().map(|(k, l)| if k == 0 { l - Gauss::one() } else { l.clone() }).collect();
                (u_part, ser_mul(&lm, &two_sigma_inv, len))
            }
        };
        let modulus = Poly::linear(z.clone()).pow(len);
        eu.push((to_poly(&su, &z).div_rem(&modulus).1, modulus.clone()));
        ev.push((to_poly(&sv, &z).div_rem(&modulus).1, modulus.clone()));
        if !z.im.is_zero() {
            let zb = z.conj();
            let mb = Poly::linear(zb.clone()).pow(len);
            eu.push((to_poly(&conj_series(&su), &zb).div_rem(&mb).1, mb.clone()));
            ev.push((to_poly(&conj_series(&sv), &zb).div_rem(&mb).1, mb));
        }
    }
    let real = |p: Poly<Gauss>| {
        p.to_rat()
            .ok_or_else(|| Error::VerificationFailed("interpolated unit is not real".into()))
    };
    let eps = QuadExtElem::new(
        RatFn::from_poly(real(crt(&eu))?),
        RatFn::from_poly(real(crt(&ev))?),
        c.clone(),
    );
    let n_eps = eps.norm();
    if !ring.is_unit(&n_eps) {
        return Err(Error::VerificationFailed("interpolated element is not a unit".into()));
    }
    let alpha = gamma.mul(&eps.mul(&eps)).scale(&n_eps.inv());
    if alpha.norm() != gamma.norm() || !alpha.in_order(ring, e) {
        return Err(Error::VerificationFailed("denominator clearing did not land in the order".into()));
    }
    Ok(alpha)
}
