//! Seeded random matrix ensembles.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::matrix::{c64, normalize, vdot, CMatrix, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Ginibre,
    Unitary,
    Diagonal,
    ComplexSymmetric,
    Hermitian,
    CommutingPair,
    CommutingNormalPair,
    SelfadjointJordanPair,
}

impl Ensemble {
    pub const ALL: [Ensemble; 8] = [
        Ensemble::Ginibre,
        Ensemble::Unitary,
        Ensemble::Diagonal,
        Ensemble::ComplexSymmetric,
        Ensemble::Hermitian,
        Ensemble::CommutingPair,
        Ensemble::CommutingNormalPair,
        Ensemble::SelfadjointJordanPair,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Ensemble::Ginibre => "ginibre",
            Ensemble::Unitary => "unitary",
            Ensemble::Diagonal => "diagonal",
            Ensemble::ComplexSymmetric => "complex-symmetric",
            Ensemble::Hermitian => "hermitian",
            Ensemble::CommutingPair => "commuting-pair",
            Ensemble::CommutingNormalPair => "commuting-normal-pair",
            Ensemble::SelfadjointJordanPair => "selfadjoint-jordan-pair",
        }
    }

    fn stream_id(self) -> u64 {
        Self::ALL.iter().position(|&e| e == self).unwrap() as u64
    }

    pub fn is_pair(self) -> bool {
        matches!(
            self,
            Ensemble::CommutingPair
                | Ensemble::CommutingNormalPair
                | Ensemble::SelfadjointJordanPair
        )
    }

    /// Draws one sample. Pair ensembles yield `Sample::Pair`.
    pub fn sample(self, n: usize, seed: u64) -> Sample {
        let mut rng = seeded_rng(seed, (self.stream_id() << 32) | n as u64);
        if self.is_pair() {
            let (a, b) = draw_pair(self, n, &mut rng);
            Sample::Pair(a, b)
        } else {
            Sample::Single(draw_single(self, n, &mut rng))
        }
    }

    /// A pair from any ensemble; single-matrix ensembles give two independent
    /// draws from one stream.
    pub fn pair(self, n: usize, seed: u64) -> (CMatrix, CMatrix) {
        let mut rng = seeded_rng(seed, (self.stream_id() << 32) | (1 << 31) | n as u64);
        if self.is_pair() {
            draw_pair(self, n, &mut rng)
        } else {
            let a = draw_single(self, n, &mut rng);
            let b = draw_single(self, n, &mut rng);
            (a, b)
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|e| e.tag() == s)
            .ok_or_else(|| Error::UnknownEnsemble(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Single(CMatrix),
    Pair(CMatrix, CMatrix),
}

/// `random_matrix(kind, n, seed)` with the ensemble given by its tag.
pub fn random_matrix(kind: &str, n: usize, seed: u64) -> Result<Sample> {
    let e: Ensemble = kind.parse()?;
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    Ok(e.sample(n, seed))
}

/// ChaCha8 generator keyed by a master seed and a stream id.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, |_, _| complex_gaussian(rng))
}

/// Uniformly distributed unit vector in `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        if normalize(&mut v) > 1e-12 {
            return v;
        }
    }
}

/// Haar-distributed unitary (Gram-Schmidt on a Ginibre matrix).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = ginibre(rng, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = g.col(j);
        for _ in 0..2 {
            for b in &cols {
                let p = vdot(&c, b);
                for (x, y) in c.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        normalize(&mut c);
        cols.push(c);
    }
    CMatrix::from_columns(&cols)
}

fn draw_single<R: Rng + ?Sized>(kind: Ensemble, n: usize, rng: &mut R) -> CMatrix {
    match kind {
        Ensemble::Ginibre => ginibre(rng, n),
        Ensemble::Unitary => haar_unitary(rng, n),
        Ensemble::Diagonal => {
            let d: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
            CMatrix::diag(&d)
        }
        Ensemble::ComplexSymmetric => {
            let g = ginibre(rng, n);
            (&g + &g.transpose()).scale_re(0.5)
        }
        Ensemble::Hermitian => ginibre(rng, n).hermitian_part(),
        _ => unreachable!("pair ensemble drawn as single"),
    }
}

fn draw_pair<R: Rng + ?Sized>(kind: Ensemble, n: usize, rng: &mut R) -> (CMatrix, CMatrix) {
    match kind {
        Ensemble::CommutingPair => {
            // b is a polynomial in a; for n = 2 this covers every matrix
            // commuting with a non-scalar a.
            let a = ginibre(rng, n);
            let mut b = CMatrix::zeros(n);
            let mut power = CMatrix::identity(n);
            for _ in 0..n {
                b += &power.scale(complex_gaussian(rng));
                power = &power * &a;
            }
            (a, b)
        }
        Ensemble::CommutingNormalPair => {
            let u = haar_unitary(rng, n);
            let d1: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
            let d2: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
            let ua = &u * &CMatrix::diag(&d1);
            let ub = &u * &CMatrix::diag(&d2);
            (&ua * &u.adjoint(), &ub * &u.adjoint())
        }
        Ensemble::SelfadjointJordanPair => (ginibre(rng, n), ginibre(rng, n)),
        _ => unreachable!("single ensemble drawn as pair"),
    }
}
