use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// One coefficient pair `(a, b)` of an elementary operator `x -> a x b`, or
/// equivalently one simple tensor `a ⊗ b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub a: CMatrix,
    pub b: CMatrix,
}

impl Term {
    pub fn new(a: CMatrix, b: CMatrix) -> Self {
        Term { a, b }
    }
}

/// Elementary operator `x -> sum_i a_i x b_i` on `n x n` matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElemOp {
    dim: usize,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct ElemOpJson {
    dim: usize,
    terms: Vec<Term>,
}

impl<'de> Deserialize<'de> for ElemOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ElemOpJson::deserialize(d)?;
        let op = ElemOp::new(raw.terms).map_err(serde::de::Error::custom)?;
        if op.dim != raw.dim {
            return Err(serde::de::Error::custom(format!(
                "declared dim {} but coefficients are {}x{}",
                raw.dim, op.dim, op.dim
            )));
        }
        Ok(op)
    }
}

impl ElemOp {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let first = terms.first().ok_or(Error::EmptyTensor)?;
        let dim = first.a.n();
        for t in &terms {
            t.a.check_dim(dim)?;
            t.b.check_dim(dim)?;
        }
        Ok(ElemOp { dim, terms })
    }

    pub fn from_pairs(pairs: Vec<(CMatrix, CMatrix)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(a, b)| Term::new(a, b)).collect())
    }

    pub fn single(a: CMatrix, b: CMatrix) -> Result<Self> {
        Self::new(vec![Term::new(a, b)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `T(x) = sum_i a_i x b_i`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        x.check_dim(self.dim)?;
        let mut out = CMatrix::zeros(self.dim);
        for t in &self.terms {
            out += &(&(&t.a * x) * &t.b);
        }
        Ok(out)
    }

    /// The `k`-th amplification acting on `k x k` block matrices with
    /// `n x n` blocks: coefficients `I_k ⊗ a_i`, `I_k ⊗ b_i`, so that a
    /// block-diagonal input is mapped blockwise.
    pub fn amplify(&self, k: usize) -> Result<ElemOp> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "amplification order must be >= 1".into(),
            ));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let id = CMatrix::identity(k);
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(id.kron(&t.a), id.kron(&t.b)))
            .collect();
        ElemOp::new(terms)
    }

    /// `T_t(x) = T(x^t)^t`, with coefficients `(b_i^t, a_i^t)`.
    pub fn transpose_map(&self) -> ElemOp {
        ElemOp {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.b.transpose(), t.a.transpose()))
                .collect(),
        }
    }

    /// `S(x) = u T(v x u) v`, with coefficients `(u a_i v, u b_i v)`.
    pub fn conjugated(&self, u: &CMatrix, v: &CMatrix) -> ElemOp {
        ElemOp {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(&(u * &t.a) * v, &(u * &t.b) * v))
                .collect(),
        }
    }

    pub fn scaled(&self, s: C64) -> ElemOp {
        ElemOp {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.a.scale(s), t.b.clone()))
                .collect(),
        }
    }

    /// Flattening of `sum_i a_i ⊗ b_i` to the `n^2 x n^2` matrix
    /// `sum_i vec(a_i) vec(b_i)^t`.
    pub fn flatten(&self) -> CMatrix {
        let n2 = self.dim * self.dim;
        let mut w = CMatrix::zeros(n2);
        for t in &self.terms {
            let (va, vb) = (t.a.vec(), t.b.vec());
            for i in 0..n2 {
                for j in 0..n2 {
                    w[(i, j)] += va[i] * vb[j];
                }
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, Ensemble};

    #[test]
    fn identity_term_is_identity_map() {
        let t = ElemOp::single(CMatrix::identity(2), CMatrix::identity(2)).unwrap();
        let x = CMatrix::from_fn(2, |i, j| c64(i as f64 + 0.5, j as f64 - 2.0));
        assert_eq!(t.apply(&x).unwrap(), x);
    }

    #[test]
    fn apply_rejects_wrong_dim() {
        let t = ElemOp::single(CMatrix::identity(2), CMatrix::identity(2)).unwrap();
        assert_eq!(
            t.apply(&CMatrix::identity(3)).unwrap_err(),
            Error::DimMismatch {
                expected: 2,
                got: 3
            }
        );
        assert!(ElemOp::new(vec![]).is_err());
        assert!(ElemOp::single(CMatrix::identity(2), CMatrix::identity(3)).is_err());
    }

    #[test]
    fn amplify_examples() {
        let (a, b) = Ensemble::Ginibre.pair(2, 3);
        let t = ElemOp::from_pairs(vec![(a.clone(), b.clone()), (b, a)]).unwrap();
        assert_eq!(t.amplify(1).unwrap(), t);
        let id = ElemOp::single(CMatrix::identity(2), CMatrix::identity(2)).unwrap();
        let id4 = ElemOp::single(CMatrix::identity(4), CMatrix::identity(4)).unwrap();
        assert_eq!(id.amplify(2).unwrap(), id4);
        assert!(t.amplify(0).is_err());
    }

    #[test]
    fn amplification_acts_blockwise() {
        let (a, b) = Ensemble::Ginibre.pair(2, 9);
        let t = ElemOp::from_pairs(vec![(a.clone(), b.clone()), (b, a)]).unwrap();
        let xs: Vec<CMatrix> = (0..3)
            .map(|s| Ensemble::Ginibre.pair(2, 100 + s).0)
            .collect();
        let big = t
            .amplify(3)
            .unwrap()
            .apply(&CMatrix::block_diag(&xs))
            .unwrap();
        let ys: Vec<CMatrix> = xs.iter().map(|x| t.apply(x).unwrap()).collect();
        assert!((&big - &CMatrix::block_diag(&ys)).frob() < 1e-13);
    }

    #[test]
    fn transpose_map_matches_definition() {
        let (a, b) = Ensemble::Ginibre.pair(2, 5);
        let t = ElemOp::from_pairs(vec![(a.clone(), b.clone()), (b, a)]).unwrap();
        let x = Ensemble::Ginibre.pair(2, 6).0;
        let lhs = t.transpose_map().apply(&x).unwrap();
        let rhs = t.apply(&x.transpose()).unwrap().transpose();
        assert!((&lhs - &rhs).frob() < 1e-13);
    }

    #[test]
    fn json_round_trip() {
        let t = ElemOp::single(CMatrix::identity(2), CMatrix::diag_real(&[1.0, 2.0])).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with(r#"{"dim":2,"terms":[{"a":{"n":2"#));
        assert_eq!(serde_json::from_str::<ElemOp>(&s).unwrap(), t);
        let bad = s.replacen(r#""dim":2"#, r#""dim":3"#, 1);
        assert!(serde_json::from_str::<ElemOp>(&bad).is_err());
    }
}
