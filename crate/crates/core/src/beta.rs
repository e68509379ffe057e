//! The equivariant operad isomorphism `β: F_n → WF_n` and its inverse.
//!
//! `β_2` is the identity. For `k ≥ 3` a point `p` is classified by the collar:
//!
//! * outside the collar image (`min u > 1/2` or no edges): `β(p) = p`;
//! * `p = c(t, w)` with `t ≤ 1`: the single vertex `c(2t, w)`;
//! * `p = c(t, w)` with `t > 1`: `w` is cut along its zero edges into
//!   fragments `x_i` (every scale positive, arity `< k`), each fragment is
//!   sent to a labelled tree by cases (0)/(1)/(2), and the results are
//!   grafted back with new edges of length `t − 1`.
//!
//! Case (2) calls `c′`, which calls `β` on the fragment's arity, so the
//! recursion terminates by arity.

use crate::collar::{collar_apply, collar_invert, COLLAR_END};
use crate::error::{Error, Result};
use crate::fm::{check_rho0, theta_compose, FmPoint};
use crate::tree::NestedTree;
use crate::w::{reassemble, WPoint};

/// Upper end of the extended collar `c′`.
pub const EXTENDED_COLLAR_END: f64 = 3.0;

/// Collar times within this distance above a seam where a new edge appears
/// (`t = 1` for `β`, `u = 2` for `c′`) are put on the seam. Both sides agree
/// there, and without this an inverse whose exact value lies on the seam
/// could come back with an edge of length `1e-16` instead of none.
pub const SEAM_SNAP: f64 = 1e-13;

fn snap_down(x: f64, seam: f64) -> f64 {
    if x > seam && x - seam <= SEAM_SNAP {
        seam
    } else {
        x
    }
}

/// Which of the three fragment cases applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FragmentCase {
    /// Fragment outside the collar image.
    Outside,
    /// Fragment `c(s, z)` with `s ≤ 1`.
    Inner,
    /// Fragment `c(s, z)` with `s > 1`.
    Outer,
}

/// Parameters shared by every evaluation of `β`; immutable and cheap to copy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaContext {
    n: usize,
    rho0: f64,
}

impl BetaContext {
    pub fn new(n: usize, rho0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
                range: "n >= 1",
            });
        }
        check_rho0(rho0)?;
        Ok(BetaContext { n, rho0 })
    }

    /// Context matching a point's dimension and threshold.
    pub fn for_point(p: &FmPoint) -> Self {
        BetaContext {
            n: p.dim(),
            rho0: p.rho0(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    fn check_fm(&self, p: &FmPoint) -> Result<()> {
        if p.dim() != self.n || p.rho0() != self.rho0 {
            return Err(Error::ShapeMismatch(format!(
                "point with (n={}, rho0={}) given to a context with (n={}, rho0={})",
                p.dim(),
                p.rho0(),
                self.n,
                self.rho0
            )));
        }
        Ok(())
    }

    fn check_w(&self, w: &WPoint) -> Result<()> {
        if w.dim() != self.n || w.rho0() != self.rho0 {
            return Err(Error::ShapeMismatch(format!(
                "point with (n={}, rho0={}) given to a context with (n={}, rho0={})",
                w.dim(),
                w.rho0(),
                self.n,
                self.rho0
            )));
        }
        Ok(())
    }

    pub fn beta(&self, p: &FmPoint) -> Result<WPoint> {
        self.check_fm(p)?;
        if p.arity() == 2 {
            return Ok(WPoint::single(p.clone()));
        }
        match collar_invert(p) {
            None => Ok(WPoint::single(p.clone())),
            Some((t, w)) => match snap_down(t, 1.0) {
                t if t <= 1.0 => self.inner_branch(t, &w),
                t => self.graft_branch(t, &w),
            },
        }
    }

    /// The formula for `β(c(t, w))` with `t ∈ [0, 1]`.
    pub fn inner_branch(&self, t: f64, w: &FmPoint) -> Result<WPoint> {
        check_unit(t)?;
        Ok(WPoint::single(collar_apply(2.0 * t, w)?))
    }

    /// The formula for `β(c(t, w))` with `t ∈ [1, 2]`. At `t = 1` every new
    /// edge has length zero and the result collapses to a single vertex.
    pub fn graft_branch(&self, t: f64, w: &FmPoint) -> Result<WPoint> {
        if !(1.0..=COLLAR_END).contains(&t) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                range: "[1, 2]",
            });
        }
        let (skeleton, fragments) = w.boundary_fragments();
        if skeleton.edge_count() == 0 {
            return Err(Error::NotBoundary);
        }
        self.graft_fragments(t, &skeleton, &fragments)
    }

    /// Sends each fragment through [`fragment_tree`](Self::fragment_tree)
    /// and grafts the results along `skeleton` with new edges of length
    /// `t − 1`.
    pub fn graft_fragments(
        &self,
        t: f64,
        skeleton: &NestedTree,
        fragments: &[FmPoint],
    ) -> Result<WPoint> {
        let parts = fragments
            .iter()
            .map(|x| self.fragment_tree(x, t))
            .collect::<Result<Vec<_>>>()?;
        reassemble(skeleton, &parts, t - 1.0)
    }

    /// The labelled tree assigned to a fragment `x` when grafting at collar
    /// time `t ∈ [1, 2]`. A fragment that is itself a boundary point is
    /// treated as `c(2, x)`.
    pub fn fragment_tree(&self, x: &FmPoint, t: f64) -> Result<WPoint> {
        match collar_invert(x) {
            None => Ok(WPoint::single(x.clone())),
            Some((s, z)) if s <= 1.0 => self.case_inner(s, t, &z),
            Some((s, z)) => self.case_outer(s, t, &z),
        }
    }

    /// Which case [`fragment_tree`](Self::fragment_tree) takes for `x`.
    pub fn fragment_case(x: &FmPoint) -> FragmentCase {
        match collar_invert(x) {
            None => FragmentCase::Outside,
            Some((s, _)) if s <= 1.0 => FragmentCase::Inner,
            Some(_) => FragmentCase::Outer,
        }
    }

    /// Case (1): the single vertex `c(s·t, z)`.
    pub fn case_inner(&self, s: f64, t: f64, z: &FmPoint) -> Result<WPoint> {
        Ok(WPoint::single(collar_apply(s * t, z)?))
    }

    /// Case (2): the tree `c′(s + t − 1, z)`.
    pub fn case_outer(&self, s: f64, t: f64, z: &FmPoint) -> Result<WPoint> {
        self.c_prime(s + t - 1.0, z)
    }

    /// The extended collar `c′: [0, 3] × ∂F(k) → WF(k)`.
    pub fn c_prime(&self, u: f64, x: &FmPoint) -> Result<WPoint> {
        if !(0.0..=EXTENDED_COLLAR_END).contains(&u) {
            return Err(Error::OutOfRange {
                name: "u",
                value: u,
                range: "[0, 3]",
            });
        }
        let u = snap_down(u, COLLAR_END);
        if u <= COLLAR_END {
            Ok(WPoint::single(collar_apply(u, x)?))
        } else {
            self.beta(&collar_apply(u - 1.0, x)?)
        }
    }

    pub fn beta_inverse(&self, w: &WPoint) -> Result<FmPoint> {
        self.check_w(w)?;
        if let Some(y) = w.single_label() {
            return Ok(match collar_invert(y) {
                Some((tau, z)) => collar_apply(tau / 2.0, &z)?,
                _ => y.clone(),
            });
        }
        let (t, w0) = self.invert_multi(w)?;
        collar_apply(t, &w0)
    }

    /// For `w` with at least one edge: the collar time `t = ℓ + 1` and the
    /// boundary point `w₀` with `β(c(t, w₀)) = w`.
    pub fn invert_multi(&self, w: &WPoint) -> Result<(f64, FmPoint)> {
        let l = w.max_length().ok_or_else(|| {
            Error::ShapeMismatch("a single-vertex point has no collar time".into())
        })?;
        let t = l + 1.0;
        let (skeleton, parts) = w.cut_max_edges()?;
        let fragments = parts
            .iter()
            .map(|part| self.invert_part(part, t))
            .collect::<Result<Vec<_>>>()?;
        Ok((t, theta_compose(&skeleton, &fragments)?))
    }

    /// Recovers the fragment that [`fragment_tree`](Self::fragment_tree)
    /// sent to `part` at collar time `t`.
    fn invert_part(&self, part: &WPoint, t: f64) -> Result<FmPoint> {
        match part.single_label() {
            Some(g) => match collar_invert(g) {
                None => Ok(g.clone()),
                Some((tau, z)) if tau <= t => collar_apply(tau / t, &z),
                Some((tau, z)) => collar_apply(tau - t + 1.0, &z),
            },
            None => {
                let (r, z) = self.invert_multi(part)?;
                collar_apply(r - t + 2.0, &z)
            }
        }
    }
}

fn check_unit(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 1]",
        })
    }
}

/// `β` with the context read off the point.
pub fn beta(p: &FmPoint) -> Result<WPoint> {
    BetaContext::for_point(p).beta(p)
}

/// `β⁻¹` with the context read off the point.
pub fn beta_inverse(w: &WPoint) -> Result<FmPoint> {
    BetaContext::new(w.dim(), w.rho0())?.beta_inverse(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::normalize;
    use crate::fm::{approx_eq, random_sample, Region, DEFAULT_RHO0};
    use crate::w::w_approx_eq;
    use nalgebra::DVector;

    fn line(xs: &[f64]) -> FmPoint {
        let pts: Vec<_> = xs.iter().map(|&x| DVector::from_vec(vec![x])).collect();
        FmPoint::interior_point(normalize(&pts).unwrap(), DEFAULT_RHO0).unwrap()
    }

    fn pair_composite() -> (FmPoint, FmPoint) {
        let a = line(&[-1.0, 1.0]);
        let tree = NestedTree::parse("[[1,2],3]").unwrap();
        (a.clone(), theta_compose(&tree, &[a.clone(), a]).unwrap())
    }

    #[test]
    fn interior_corolla_is_fixed() {
        let p = line(&[-1.0, 0.0, 1.0]);
        assert_eq!(beta(&p).unwrap(), WPoint::single(p.clone()));
        assert_eq!(beta_inverse(&WPoint::single(p.clone())).unwrap(), p);
    }

    #[test]
    fn boundary_composite_gets_unit_edge() {
        let (a, p) = pair_composite();
        let w = beta(&p).unwrap();
        assert_eq!(w.lengths(), vec![1.0]);
        assert_eq!(w.labels(), vec![&a, &a]);
        assert_eq!(beta_inverse(&w).unwrap(), p);
    }

    #[test]
    fn eighth_scale_gives_half_length() {
        let (a, p) = pair_composite();
        let p = p.map_edge_u(|_| 0.125);
        let w = beta(&p).unwrap();
        assert_eq!(w.lengths(), vec![0.5]);
        assert_eq!(w.labels(), vec![&a, &a]);
        assert_eq!(beta_inverse(&w).unwrap(), p);
    }

    #[test]
    fn inverse_of_two_vertex_point() {
        let (a, _) = pair_composite();
        let tree = NestedTree::parse("[[1,2],3]").unwrap();
        for &l in &[0.1, 0.5, 0.9, 1.0] {
            let w = WPoint::make(&tree, vec![a.clone(), a.clone()], vec![l]).unwrap();
            let p = beta_inverse(&w).unwrap();
            assert!((p.edge_u()[0] - (1.0 - l) / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn f2_is_identity() {
        for seed in 0..20 {
            let p = random_sample(3, 2, seed, Region::Interior).unwrap();
            assert_eq!(beta(&p).unwrap(), WPoint::single(p.clone()));
        }
    }

    #[test]
    fn c_prime_ends() {
        let (_, x) = pair_composite();
        let ctx = BetaContext::for_point(&x);
        assert_eq!(ctx.c_prime(2.0, &x).unwrap(), WPoint::single(x.clone()));
        assert_eq!(
            ctx.c_prime(0.0, &x).unwrap(),
            WPoint::single(collar_apply(0.0, &x).unwrap())
        );
        let top = ctx.c_prime(3.0, &x).unwrap();
        assert_eq!(top, beta(&x).unwrap());
        assert_eq!(top.lengths(), vec![1.0]);
        assert!(ctx.c_prime(3.5, &x).is_err());
        assert!(ctx.c_prime(1.0, &line(&[0.0, 1.0, 3.0])).is_err());
    }

    #[test]
    fn round_trips_on_samples() {
        for seed in 0..300 {
            let k = 2 + (seed as usize % 4);
            let n = 1 + (seed as usize % 3);
            let region = Region::ALL[(seed as usize / 4) % 4];
            if !region.exists_at(k) {
                continue;
            }
            let p = random_sample(n, k, seed, region).unwrap();
            let w = beta(&p).unwrap();
            let back = beta_inverse(&w).unwrap();
            assert!(approx_eq(&back, &p, 1e-9).unwrap(), "seed {seed}: {p:?} -> {back:?}");
            assert!(w_approx_eq(&beta(&back).unwrap(), &w, 1e-9).unwrap());
        }
    }

    #[test]
    fn context_rejects_mismatch() {
        let p = line(&[0.0, 1.0, 3.0]);
        let ctx = BetaContext::new(2, DEFAULT_RHO0).unwrap();
        assert!(ctx.beta(&p).is_err());
        assert!(BetaContext::new(0, DEFAULT_RHO0).is_err());
        assert!(BetaContext::new(1, 0.5).is_err());
    }
}
