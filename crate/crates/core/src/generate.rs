//! Seeded planted instances.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::{GroundTruth, InstanceFile};
use crate::matpoly::is_psd_matrix;
use crate::matrix::{FieldTag, Matrix, PolyMatrix};
use crate::poly::Poly;
use crate::roots::{gaussian_roots, is_squarefree};
use crate::scalar::{gi, Gauss, Rat};
use crate::twosquares::{enumerate_complex_scalar_classes, enumerate_two_squares_real, TwoSquares};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `M = S0* diag(1, ..., 1, d) S0` with `S0` unimodular.
    PlantedUnimodular,
    /// `M = Q0* Q0` for a random integer-polynomial `Q0`.
    PlantedGeneric,
    /// `1 x 1` instances `[d]`.
    ScalarOnly,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::PlantedUnimodular => "planted-unimodular",
            Family::PlantedGeneric => "planted-generic",
            Family::ScalarOnly => "scalar-only",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planted-unimodular" => Ok(Family::PlantedUnimodular),
            "planted-generic" => Ok(Family::PlantedGeneric),
            "scalar-only" => Ok(Family::ScalarOnly),
            other => Err(Error::Schema(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub family: Family,
    pub field: FieldTag,
    pub n: usize,
    /// Number of conjugate root pairs of `det M`.
    pub pairs: usize,
    /// Degree bound for the entries of the random polynomial factors.
    pub degree: usize,
    pub seed: u64,
    pub enforce_admissible: bool,
    pub max_tries: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            family: Family::PlantedUnimodular,
            field: FieldTag::Real,
            n: 2,
            pairs: 2,
            degree: 1,
            seed: 0,
            enforce_admissible: true,
            max_tries: 50,
        }
    }
}

/// Distinct Gaussian integers in the upper half plane.
fn upper_roots(rng: &mut ChaCha8Rng, k: usize) -> Vec<Gauss> {
    let mut pool: Vec<(i64, i64)> = (-3..=3).flat_map(|a| (1..=3).map(move |b| (a, b))).collect();
    pool.shuffle(rng);
    pool.into_iter().take(k).map(|(a, b)| gi(a, b)).collect()
}

fn small_poly(rng: &mut ChaCha8Rng, degree: usize) -> Poly<Gauss> {
    let cs: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-2..=2)).collect();
    Poly::<Rat>::from_i64s(&cs).to_gauss()
}

/// Product of random elementary row operations with polynomial multipliers.
fn unimodular(rng: &mut ChaCha8Rng, n: usize, degree: usize) -> PolyMatrix<Gauss> {
    let mut s = PolyMatrix::<Gauss>::identity(n);
    if n < 2 {
        return s;
    }
    for _ in 0..n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let p = small_poly(rng, degree);
        s.add_row(i, j, &p);
    }
    s
}

/// Random integer matrix with determinant `±1`.
fn constant_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Gauss> {
    let mut u = Matrix::<Gauss>::identity(n);
    if n < 2 {
        return u;
    }
    for _ in 0..n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        u.add_row(i, j, &gi(rng.gen_range(-2..=2), 0));
    }
    u
}

fn linear_product(zs: &[Gauss]) -> Poly<Gauss> {
    zs.iter().fold(Poly::one(), |acc, z| &acc * &Poly::linear(z.clone()))
}

/// `(n+1) x n` block `I_{n-1} ⊕ (a, b)^T`.
fn two_squares_block(n: usize, a: &Poly<Gauss>, b: &Poly<Gauss>) -> PolyMatrix<Gauss> {
    Matrix::from_fn(n + 1, n, |i, j| {
        if i < n - 1 && i == j {
            Poly::one()
        } else if j == n - 1 && i == n - 1 {
            a.clone()
        } else if j == n - 1 && i == n {
            b.clone()
        } else {
            Poly::zero()
        }
    })
}

fn real_pair(g: &Poly<Gauss>) -> (Poly<Gauss>, Poly<Gauss>) {
    let d = (&g.star() * g).to_rat().expect("real");
    match TwoSquares::from_complex(g, &d) {
        TwoSquares::Real { a, b, .. } => (a.to_gauss(), b.to_gauss()),
        TwoSquares::Complex { .. } => unreachable!(),
    }
}

fn draw(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> PolyMatrix<Gauss> {
    let n = cfg.n;
    let zs = upper_roots(rng, cfg.pairs);
    let g = linear_product(&zs);
    let real = cfg.field == FieldTag::Real;
    match cfg.family {
        Family::ScalarOnly => {
            if real {
                let (a, b) = real_pair(&g);
                Matrix::column(&[a, b])
            } else {
                Matrix::diag(&[g])
            }
        }
        Family::PlantedUnimodular => {
            let s0 = unimodular(rng, n, cfg.degree);
            if real {
                let (a, b) = real_pair(&g);
                two_squares_block(n, &a, &b).mul(&s0)
            } else {
                let mut diag = vec![Poly::one(); n];
                diag[n - 1] = g;
                Matrix::diag(&diag).mul(&s0)
            }
        }
        Family::PlantedGeneric => {
            let s0 = unimodular(rng, n, cfg.degree);
            if real {
                let (a, b) = real_pair(&g);
                let (p, q) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
                let c = Matrix::from_rows(vec![vec![gi(p, 0), gi(-q, 0)], vec![gi(q, 0), gi(p, 0)]]);
                let w = constant_unimodular(rng, n - 1).direct_sum(&c);
                PolyMatrix::from_constant(&w).mul(&two_squares_block(n, &a, &b)).mul(&s0)
            } else {
                let mut diag = vec![Poly::<Gauss>::one(); n];
                for z in &zs {
                    let i = rng.gen_range(0..n);
                    diag[i] = &diag[i] * &Poly::linear(z.clone());
                }
                let u0 = constant_unimodular(rng, n);
                PolyMatrix::from_constant(&u0).mul(&Matrix::diag(&diag)).mul(&s0)
            }
        }
    }
}

fn admissible(m: &PolyMatrix<Gauss>) -> Result<bool> {
    let d = m.det();
    let Some(dr) = d.to_rat() else {
        return Ok(false);
    };
    if dr.is_zero() || !is_psd_matrix(m)? {
        return Ok(false);
    }
    let squarefree = dr.is_constant() || is_squarefree(&dr);
    Ok(squarefree && (dr.is_constant() || gaussian_roots(&dr).is_ok()))
}

/// Deterministic planted instance for `cfg`.
pub fn generate(cfg: &GeneratorConfig) -> Result<InstanceFile> {
    if cfg.n == 0 || (cfg.family == Family::ScalarOnly && cfg.n != 1) {
        return Err(Error::PreconditionViolated("scalar-only instances have n = 1; others need n >= 1".into()));
    }
    if cfg.pairs == 0 || cfg.pairs > 21 {
        return Err(Error::PreconditionViolated("between 1 and 21 root pairs".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.max_tries.max(1) {
        let q0 = draw(cfg, &mut rng);
        let m = q0.gram();
        if cfg.enforce_admissible && !admissible(&m)? {
            continue;
        }
        let d = m.det().to_rat().ok_or(Error::NotHermitian)?;
        let classes = match cfg.field {
            FieldTag::Real => enumerate_two_squares_real(&d),
            FieldTag::Complex => enumerate_complex_scalar_classes(&d),
        };
        let classes = match classes {
            Ok(cs) => cs.iter().map(TwoSquares::as_complex).collect(),
            Err(_) if !cfg.enforce_admissible => Vec::new(),
            Err(e) => return Err(e),
        };
        let mut inst = InstanceFile::new(cfg.field, m);
        inst.ground_truth = Some(GroundTruth {
            family: Some(cfg.family.as_str().to_string()),
            seed: Some(cfg.seed),
            factorization: Some(q0),
            classes,
        });
        return Ok(inst);
    }
    Err(Error::BudgetExhausted(format!(
        "no admissible instance in {} draws",
        cfg.max_tries
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::serialize_instance;
    use crate::matpoly::verify_factorization;

    #[test]
    fn deterministic() {
        let cfg = GeneratorConfig {
            seed: 7,
            ..GeneratorConfig::default()
        };
        let a = serialize_instance(&generate(&cfg).unwrap());
        let b = serialize_instance(&generate(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn families_are_admissible() {
        for family in [Family::PlantedUnimodular, Family::PlantedGeneric] {
            for field in [FieldTag::Real, FieldTag::Complex] {
                for n in 1..=3 {
                    let cfg = GeneratorConfig {
                        family,
                        field,
                        n,
                        seed: 11,
                        ..GeneratorConfig::default()
                    };
                    let inst = generate(&cfg).unwrap();
                    assert!(admissible(&inst.matrix).unwrap());
                    let gt = inst.ground_truth.unwrap();
                    assert!(verify_factorization(&gt.factorization.unwrap(), &inst.matrix).unwrap().verified);
                    let expect = if field == FieldTag::Real { 2 } else { 4 };
                    assert_eq!(gt.classes.len(), expect);
                }
            }
        }
    }

    #[test]
    fn scalar_only_classes() {
        let cfg = GeneratorConfig {
            family: Family::ScalarOnly,
            field: FieldTag::Complex,
            n: 1,
            pairs: 3,
            ..GeneratorConfig::default()
        };
        let inst = generate(&cfg).unwrap();
        let gt = inst.ground_truth.unwrap();
        assert_eq!(gt.classes.len(), 8);
        let d = inst.matrix.get(0, 0).clone();
        assert!(gt.classes.iter().all(|g| &g.star() * g == d));
    }
}
