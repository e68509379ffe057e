//! The symmetry group `Σ_k × O(n)`.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// A bijection of `{1, …, k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation {
            images: (1..=k).collect(),
        }
    }

    /// `images[i - 1] = σ(i)`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &a in &images {
            if a == 0 || a > k || seen[a - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection of 1..={k}"
                )));
            }
            seen[a - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (1..=k).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &a)| a == i + 1)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            images: other.images.iter().map(|&a| self.apply(a)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &a) in self.images.iter().enumerate() {
            images[a - 1] = i + 1;
        }
        Permutation { images }
    }

    /// All permutations of `k` letters in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if prefix.len() == used.len() {
                out.push(Permutation {
                    images: prefix.clone(),
                });
                return;
            }
            for a in 0..used.len() {
                if !used[a] {
                    used[a] = true;
                    prefix.push(a + 1);
                    go(prefix, used, out);
                    prefix.pop();
                    used[a] = false;
                }
            }
        }
        let mut out = Vec::new();
        go(&mut Vec::new(), &mut vec![false; k], &mut out);
        out
    }
}

/// An element `(σ, Q)` of `Σ_k × O(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    perm: Permutation,
    q: DMatrix<f64>,
}

pub fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    let gram = q.transpose() * q;
    (gram - DMatrix::<f64>::identity(n, n)).amax()
}

impl GroupElement {
    pub fn new(perm: Permutation, q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() || q.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "orthogonal part must be square, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        let defect = orthogonality_defect(&q);
        if defect > ORTHOGONALITY_TOLERANCE {
            return Err(Error::NotOrthogonal(defect));
        }
        Ok(GroupElement { perm, q })
    }

    pub fn identity(k: usize, n: usize) -> Self {
        GroupElement {
            perm: Permutation::identity(k),
            q: DMatrix::identity(n, n),
        }
    }

    pub fn from_perm(perm: Permutation, n: usize) -> Self {
        GroupElement {
            perm,
            q: DMatrix::identity(n, n),
        }
    }

    pub fn from_orthogonal(k: usize, q: DMatrix<f64>) -> Result<Self> {
        Self::new(Permutation::identity(k), q)
    }

    /// Haar-random element: uniform permutation, and the orthogonal factor
    /// of a Gaussian matrix with the signs of `R`'s diagonal absorbed.
    pub fn random<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Self {
        let perm = Permutation::random(k, rng);
        GroupElement {
            perm,
            q: random_orthogonal(n, rng),
        }
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn arity(&self) -> usize {
        self.perm.len()
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// Group product; acting by the result equals acting by `other` first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            perm: self.perm.compose(&other.perm),
            q: &self.q * &other.q,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            perm: self.perm.inverse(),
            q: self.q.transpose(),
        }
    }
}

pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permutation_algebra() {
        let s = Permutation::from_images(vec![2, 3, 1]).unwrap();
        let t = Permutation::from_images(vec![1, 3, 2]).unwrap();
        let st = s.compose(&t);
        for i in 1..=3 {
            assert_eq!(st.apply(i), s.apply(t.apply(i)));
        }
        assert!(s.compose(&s.inverse()).is_identity());
        assert_eq!(Permutation::all(4).len(), 24);
        assert!(Permutation::from_images(vec![1, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 1]).is_err());
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..5 {
            for _ in 0..20 {
                let q = random_orthogonal(n, &mut rng);
                assert!(orthogonality_defect(&q) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_orthogonal() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            GroupElement::new(Permutation::identity(2), q),
            Err(Error::NotOrthogonal(_))
        ));
    }
}
