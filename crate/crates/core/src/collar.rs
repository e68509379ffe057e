//! The equivariant collar `c: [0,2] × ∂F(k) → F(k)`.
//!
//! In normal-form coordinates every edge scale is pushed towards 1 by the
//! stitched factor `1/2 + t/4`:
//!
//! ```text
//! u' = 1 − (1/2 + t/4)(1 − u)
//! ```
//!
//! so `t = 2` is the identity on the boundary and the smallest scale of the
//! image is `1/2 − t/4`, attained exactly on the edges that were zero. In the
//! transverse coordinate `τ = 2(1 − u)` this is the scaling
//! `τ ↦ (1/2 + t/4) τ` of every face coordinate at once. The formula only
//! touches scales, so it commutes with the `Σ_k × O(n)` action, and it is
//! inverted in closed form by [`collar_invert`].

use crate::error::{Error, Result};
use crate::fm::FmPoint;

/// Collar times live in `[0, COLLAR_END]`; the boundary sits at the end.
pub const COLLAR_END: f64 = 2.0;

fn check_time(t: f64) -> Result<()> {
    if (0.0..=COLLAR_END).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 2]",
        })
    }
}

/// Stitching factor applied to the transverse coordinates at collar time `t`.
pub fn stitch_factor(t: f64) -> f64 {
    0.5 + t / 4.0
}

/// Image of one edge scale under the collar at time `t`.
pub fn collar_scale(t: f64, u: f64) -> f64 {
    1.0 - stitch_factor(t) * (1.0 - u)
}

/// `c(t, x)` for a boundary point `x`.
pub fn collar_apply(t: f64, x: &FmPoint) -> Result<FmPoint> {
    check_time(t)?;
    if !x.is_boundary() {
        return Err(Error::NotBoundary);
    }
    if t == COLLAR_END {
        return Ok(x.clone());
    }
    Ok(x.map_edge_u(|u| collar_scale(t, u)))
}

/// Inverse of the collar: `Some((t, x))` with `collar_apply(t, x) = y` when
/// `y` has an edge with `u ≤ 1/2`, otherwise `None`.
pub fn collar_invert(y: &FmPoint) -> Option<(f64, FmPoint)> {
    let m = y.min_u()?;
    if m > 0.5 {
        return None;
    }
    let t = COLLAR_END - 4.0 * m;
    let x = if m == 0.0 {
        y.clone()
    } else {
        y.map_edge_u(|u| if u == m { 0.0 } else { (u - m) / (1.0 - m) })
    };
    Some((t, x))
}

/// Whether `y` lies in the image of the collar.
pub fn in_collar(y: &FmPoint) -> bool {
    y.min_u().is_some_and(|m| m <= 0.5)
}
