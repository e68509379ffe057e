//! Randomized property suites with deterministic, order-independent reports.
//!
//! Every trial draws from its own generator seeded by `(seed, trial)`, trials
//! run in parallel, and reports only keep counts and maxima, so a report is a
//! function of its [`RunConfig`] alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::{BetaContext, FragmentCase};
use crate::collar::{collar_apply, collar_invert, collar_scale, in_collar};
use crate::config::{config_dist, NormalizedConfig};
use crate::error::{Error, Result};
use crate::fm::{
    self, chart_distance, compose_at, decompose, sample_interior_normal_form, sample_with,
    theta_compose, FmPoint, Region, DEFAULT_RHO0,
};
use crate::group::{GroupElement, Permutation};
use crate::tree::{enumerate_trees, NestedTree, Shape};
use crate::w::{reassemble, sample_w_with, w_chart_distance, w_compose, w_compose_at, w_realization_distance, WPoint};

/// Scales of the interior normal forms used by the chart round trip. Nested
/// clusters shrink like `(ρ0·u)^depth`, so scales are kept away from zero to
/// stay well inside double precision. Near `u = 1` a neighbouring cluster
/// can push a subset below the detection threshold, so the upper end stays
/// clear of `1 - ρ0`.
pub const CHART_U_MIN: f64 = 0.3;
pub const CHART_U_MAX: f64 = 0.9;

/// Step used by the continuity probes across each seam.
pub const SEAM_EPSILON: f64 = 1e-6;

/// Tolerances of the individual suites.
pub mod tol {
    pub const ROUND_TRIP: f64 = 1e-9;
    pub const MORPHISM: f64 = 1e-10;
    pub const EQUIVARIANCE: f64 = 1e-10;
    pub const COLLAR_END: f64 = 1e-15;
    pub const COLLAR_INVERSE: f64 = 1e-12;
    pub const SEAM: f64 = 1e-12;
    pub const SEAM_PROBE: f64 = 1e-4;
    pub const MAX_LENGTH: f64 = 1e-12;
    pub const CHART: f64 = 1e-10;
    pub const SPHERE: f64 = 1e-12;
    pub const FREENESS: f64 = 1e-6;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub trials: usize,
    pub rho0: f64,
    /// Overrides the per-suite tolerance when set.
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn new(n: usize, k: usize, seed: u64, trials: usize) -> Self {
        RunConfig {
            n,
            k,
            seed,
            trials,
            rho0: DEFAULT_RHO0,
            tolerance: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fm::check_rho0(self.rho0)?;
        if self.n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
                range: "n >= 1",
            });
        }
        if self.k < 2 {
            return Err(Error::UnsupportedArity(self.k));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Error::OutOfRange {
                    name: "tolerance",
                    value: t,
                    range: "> 0",
                });
            }
        }
        Ok(())
    }

    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    fn with_k(&self, k: usize) -> RunConfig {
        RunConfig { k, ..self.clone() }
    }
}

/// Outcome of a suite. `failures` holds the first few failing trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub passed: usize,
    pub failed: usize,
    pub max_error: f64,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Report>,
}

const MAX_LISTED_FAILURES: usize = 5;

impl Report {
    /// A trial passes when it returns an error measure `≤ tol`.
    pub fn from_outcomes(command: &str, tol: f64, outcomes: Vec<Result<f64>>) -> Report {
        let mut report = Report {
            command: command.to_string(),
            passed: 0,
            failed: 0,
            max_error: 0.0,
            trials: outcomes.len(),
            failures: Vec::new(),
            parts: Vec::new(),
        };
        for (i, o) in outcomes.into_iter().enumerate() {
            let msg = match o {
                Ok(e) if e <= tol => {
                    report.max_error = report.max_error.max(e);
                    report.passed += 1;
                    continue;
                }
                Ok(e) => {
                    report.max_error = if e.is_nan() { f64::NAN } else { report.max_error.max(e) };
                    format!("trial {i}: error {e:e} exceeds {tol:e}")
                }
                Err(e) => format!("trial {i}: {e}"),
            };
            report.failed += 1;
            if report.failures.len() < MAX_LISTED_FAILURES {
                report.failures.push(msg);
            }
        }
        report
    }

    /// Sums counts and takes the largest error over `parts`.
    pub fn combine(command: &str, parts: Vec<Report>) -> Report {
        Report {
            command: command.to_string(),
            passed: parts.iter().map(|p| p.passed).sum(),
            failed: parts.iter().map(|p| p.failed).sum(),
            max_error: parts.iter().map(|p| p.max_error).fold(0.0, f64::max),
            trials: parts.iter().map(|p| p.trials).sum(),
            failures: Vec::new(),
            parts,
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// Drops failure messages and nested parts.
    pub fn summary(&self) -> Report {
        Report {
            failures: Vec::new(),
            parts: Vec::new(),
            ..self.clone()
        }
    }
}

/// Seed of the generator owned by one trial.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trials(
    cfg: &RunConfig,
    salt: u64,
    f: impl Fn(&mut ChaCha8Rng, usize) -> Result<f64> + Sync,
) -> Vec<Result<f64>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed ^ salt, i));
            f(&mut rng, i)
        })
        .collect()
}

fn fm_dist(p: &FmPoint, q: &FmPoint) -> Result<f64> {
    Ok(chart_distance(p, q)?.unwrap_or(f64::INFINITY))
}

fn w_dist(v: &WPoint, w: &WPoint) -> Result<f64> {
    Ok(w_chart_distance(v, w)?.unwrap_or(f64::INFINITY))
}

fn regions_at(k: usize) -> Vec<Region> {
    Region::ALL.into_iter().filter(|r| r.exists_at(k)).collect()
}

fn need_boundary(cfg: &RunConfig, what: &str) -> Result<()> {
    if cfg.k < 3 {
        return Err(Error::ShapeMismatch(format!("{what} needs k >= 3, F(2) has no boundary")));
    }
    Ok(())
}

/// `β⁻¹∘β = id` on samples from every region and `β∘β⁻¹ = id` on random
/// points of `WF`.
pub fn roundtrip(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let ctx = BetaContext::new(cfg.n, cfg.rho0)?;
    let regions = regions_at(cfg.k);
    let outcomes = run_trials(cfg, 1, |rng, i| {
        let p = sample_with(rng, cfg.n, cfg.k, cfg.rho0, regions[i % regions.len()])?;
        let there = fm_dist(&ctx.beta_inverse(&ctx.beta(&p)?)?, &p)?;
        let w = sample_w_with(rng, cfg.n, cfg.k, cfg.rho0)?;
        let back = w_dist(&ctx.beta(&ctx.beta_inverse(&w)?)?, &w)?;
        Ok(there.max(back))
    });
    Ok(Report::from_outcomes("roundtrip", cfg.tol(tol::ROUND_TRIP), outcomes))
}

fn one_edge_tree<R: Rng + ?Sized>(rng: &mut R, k1: usize, k2: usize) -> Result<NestedTree> {
    let i = rng.random_range(1..=k1);
    Ok(NestedTree::corolla(k1)?.graft(i, &NestedTree::corolla(k2)?)?.0)
}

fn any_sample<R: Rng + ?Sized>(rng: &mut R, cfg: &RunConfig, k: usize) -> Result<FmPoint> {
    let regions = regions_at(k);
    let r = regions[rng.random_range(0..regions.len())];
    sample_with(rng, cfg.n, k, cfg.rho0, r)
}

/// `β(θ_T(x, x̄)) = θ_T(β(x), β(x̄))` for one-edge trees, with the new edge
/// of length exactly 1.
pub fn operad_morphism(cfg: &RunConfig, k1: usize, k2: usize) -> Result<Report> {
    cfg.validate()?;
    let ctx = BetaContext::new(cfg.n, cfg.rho0)?;
    let outcomes = run_trials(cfg, 2 + 16 * (k1 as u64) + k2 as u64, |rng, _| {
        let x = any_sample(rng, cfg, k1)?;
        let y = any_sample(rng, cfg, k2)?;
        let tree = one_edge_tree(rng, k1, k2)?;
        let lhs = ctx.beta(&theta_compose(&tree, &[x.clone(), y.clone()])?)?;
        let rhs = w_compose(&tree, &[ctx.beta(&x)?, ctx.beta(&y)?])?;
        let graft_edge = rhs.max_length();
        if graft_edge != Some(1.0) {
            return Err(Error::ShapeMismatch(format!(
                "composite has maximal length {graft_edge:?}, expected exactly 1"
            )));
        }
        w_dist(&lhs, &rhs)
    });
    Ok(Report::from_outcomes(
        &format!("operad-morphism k1={k1} k2={k2}"),
        cfg.tol(tol::MORPHISM),
        outcomes,
    ))
}

/// `tree` with leaf `a` renamed `σ(a)`, children kept in written order.
fn relabel_as_written(tree: &NestedTree, sigma: &Permutation) -> Result<NestedTree> {
    fn go(s: &Shape, sigma: &Permutation) -> Shape {
        match s {
            Shape::Leaf(a) => Shape::Leaf(sigma.apply(*a)),
            Shape::Node(cs) => Shape::Node(cs.iter().map(|c| go(c, sigma)).collect()),
        }
    }
    NestedTree::from_shape_as_written(&go(&tree.to_shape(), sigma))
}

fn rotate_only(p: &FmPoint, q: &GroupElement) -> Result<FmPoint> {
    p.act(&GroupElement::from_orthogonal(p.arity(), q.q().clone())?)
}

fn w_rotate_only(w: &WPoint, q: &GroupElement) -> Result<WPoint> {
    w.act(&GroupElement::from_orthogonal(w.arity(), q.q().clone())?)
}

/// Equivariance of `β`, of composition in `F` and `WF`, and of the collar.
/// Compositions are compared against grafting along the relabelled tree
/// with rotated labels.
pub fn equivariance(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let ctx = BetaContext::new(cfg.n, cfg.rho0)?;
    let k = cfg.k;
    let t_eq = cfg.tol(tol::EQUIVARIANCE);
    let beta = run_trials(cfg, 3, |rng, _| {
        let p = any_sample(rng, cfg, k)?;
        let g = GroupElement::random(k, cfg.n, rng);
        w_dist(&ctx.beta(&p.act(&g)?)?, &ctx.beta(&p)?.act(&g)?)
    });
    let theta = run_trials(cfg, 4, |rng, _| {
        let tree = fm::random_tree(rng, k);
        let labels = tree
            .vertices()
            .into_iter()
            .map(|v| any_sample(rng, cfg, v.valence()))
            .collect::<Result<Vec<_>>>()?;
        let g = GroupElement::random(k, cfg.n, rng);
        let lhs = theta_compose(&tree, &labels)?.act(&g)?;
        let rotated = labels.iter().map(|l| rotate_only(l, &g)).collect::<Result<Vec<_>>>()?;
        let rhs = theta_compose(&relabel_as_written(&tree, g.perm())?, &rotated)?;
        fm_dist(&lhs, &rhs)
    });
    let wcomp = run_trials(cfg, 5, |rng, _| {
        let tree = fm::random_tree(rng, k);
        let parts = tree
            .vertices()
            .into_iter()
            .map(|v| sample_w_with(rng, cfg.n, v.valence(), cfg.rho0))
            .collect::<Result<Vec<_>>>()?;
        let g = GroupElement::random(k, cfg.n, rng);
        let lhs = w_compose(&tree, &parts)?.act(&g)?;
        let rotated = parts.iter().map(|w| w_rotate_only(w, &g)).collect::<Result<Vec<_>>>()?;
        let rhs = w_compose(&relabel_as_written(&tree, g.perm())?, &rotated)?;
        w_dist(&lhs, &rhs)
    });
    let mut parts = vec![
        Report::from_outcomes("equivariance beta", t_eq, beta),
        Report::from_outcomes("equivariance theta", t_eq, theta),
        Report::from_outcomes("equivariance w-compose", t_eq, wcomp),
    ];
    if k >= 3 {
        let collar = run_trials(cfg, 6, |rng, _| {
            let x = sample_with(rng, cfg.n, k, cfg.rho0, Region::Boundary)?;
            let t = rng.random_range(0.0..=2.0);
            let g = GroupElement::random(k, cfg.n, rng);
            fm_dist(&collar_apply(t, &x.act(&g)?)?, &collar_apply(t, &x)?.act(&g)?)
        });
        parts.push(Report::from_outcomes("equivariance collar", t_eq, collar));
    }
    Ok(Report::combine("check-equivariance", parts))
}

/// `c(2, x) = x`, `collar_invert ∘ collar_apply = id`, and membership in the
/// image is exactly `min u ≤ 1/2`.
pub fn collar_exactness(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    need_boundary(cfg, "collar exactness")?;
    let end = run_trials(cfg, 7, |rng, _| {
        let x = sample_with(rng, cfg.n, cfg.k, cfg.rho0, Region::Boundary)?;
        fm_dist(&collar_apply(2.0, &x)?, &x)
    });
    let inverse = run_trials(cfg, 8, |rng, _| {
        let x = sample_with(rng, cfg.n, cfg.k, cfg.rho0, Region::Boundary)?;
        let t = rng.random_range(0.0..=2.0);
        let (s, z) = collar_invert(&collar_apply(t, &x)?)
            .ok_or_else(|| Error::ShapeMismatch("collar image not recognized".into()))?;
        Ok((s - t).abs().max(fm_dist(&z, &x)?))
    });
    let regions = regions_at(cfg.k);
    let image = run_trials(cfg, 9, |rng, i| {
        let y = sample_with(rng, cfg.n, cfg.k, cfg.rho0, regions[i % regions.len()])?;
        let by_scale = y.min_u().is_some_and(|m| m <= 0.5);
        if by_scale != in_collar(&y) {
            return Ok(f64::INFINITY);
        }
        match collar_invert(&y) {
            Some((t, x)) if by_scale => fm_dist(&collar_apply(t, &x)?, &y),
            None if !by_scale => Ok(0.0),
            _ => Ok(f64::INFINITY),
        }
    });
    Ok(Report::combine(
        "collar-exactness",
        vec![
            Report::from_outcomes("collar end is identity", cfg.tol(tol::COLLAR_END), end),
            Report::from_outcomes("collar inverse", cfg.tol(tol::COLLAR_INVERSE), inverse),
            Report::from_outcomes("collar image", cfg.tol(tol::COLLAR_INVERSE), image),
        ],
    ))
}

/// `max_length(β(c(t, w))) = t − 1` for `t ∈ [1, 2]`.
pub fn max_length_law(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    need_boundary(cfg, "max-length law")?;
    let ctx = BetaContext::new(cfg.n, cfg.rho0)?;
    let outcomes = run_trials(cfg, 10, |rng, _| {
        let w = sample_with(rng, cfg.n, cfg.k, cfg.rho0, Region::Boundary)?;
        let t = rng.random_range(1.0..=2.0);
        let l = ctx.beta(&collar_apply(t, &w)?)?.max_length().unwrap_or(0.0);
        Ok((l - (t - 1.0)).abs())
    });
    Ok(Report::from_outcomes("max-length", cfg.tol(tol::MAX_LENGTH), outcomes))
}

/// `decompose ∘ realize = id` on interior normal forms, and
/// `realize ∘ decompose = id` on their realizations.
pub fn chart_round_trip(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let outcomes = run_trials(cfg, 11, |rng, _| {
        let p = sample_interior_normal_form(rng, cfg.n, cfg.k, cfg.rho0, CHART_U_MIN, CHART_U_MAX);
        let x = p.realize()?;
        let q = decompose(x.points(), cfg.rho0)?;
        let y = q.realize()?;
        Ok(fm_dist(&q, &p)?.max(config_dist(&x, &y)?))
    });
    Ok(Report::from_outcomes("chart-roundtrip", cfg.tol(tol::CHART), outcomes))
}

/// The extended-collar formula, also defined slightly outside `[0, 2]`, used
/// to step across the `t = 0` seam from the outside.
fn extended_collar(t: f64, x: &FmPoint) -> FmPoint {
    x.map_edge_u(|u| collar_scale(t, u))
}

/// A boundary point with one zero edge whose upper fragment is `c(s, z)`
/// for a boundary `z` of arity `m ≥ 3`; the other fragment is interior.
struct SeamProbe {
    z: FmPoint,
    other: FmPoint,
    tree: NestedTree,
}

impl SeamProbe {
    fn sample<R: Rng + ?Sized>(rng: &mut R, cfg: &RunConfig) -> Result<Self> {
        let m = rng.random_range(3..cfg.k);
        let k2 = cfg.k - m + 1;
        let z = sample_with(rng, cfg.n, m, cfg.rho0, Region::Boundary)?;
        let other = sample_with(rng, cfg.n, k2, cfg.rho0, Region::Interior)?;
        let i = rng.random_range(1..=k2);
        let tree = NestedTree::corolla(k2)?.graft(i, &NestedTree::corolla(m)?)?.0;
        Ok(SeamProbe { z, other, tree })
    }

    /// `w = θ_T(other, x)` where `x` is the fragment.
    fn point(&self, x: &FmPoint) -> Result<FmPoint> {
        theta_compose(&self.tree, &[self.other.clone(), x.clone()])
    }

    /// `β(c(t, w))` with the fragment's tree given by `frag`.
    fn beta_with(&self, t: f64, frag: WPoint) -> Result<WPoint> {
        let parts = [WPoint::single(self.other.clone()), frag];
        reassemble(&self.tree, &parts, t - 1.0)
    }
}

/// Agreement of the branch formulas at the seams `t ∈ {0, 1}` and
/// `s ∈ {0, 1}`, and continuity of `β` across them.
pub fn seams(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    need_boundary(cfg, "seam checks")?;
    let ctx = BetaContext::new(cfg.n, cfg.rho0)?;
    let eps = SEAM_EPSILON;
    let t_seam = cfg.tol(tol::SEAM);
    let t_probe = cfg.tol(tol::SEAM_PROBE);

    let boundary = |rng: &mut ChaCha8Rng| sample_with(rng, cfg.n, cfg.k, cfg.rho0, Region::Boundary);

    let t0 = run_trials(cfg, 12, |rng, _| {
        let w = boundary(rng)?;
        let p = collar_apply(0.0, &w)?;
        let outside = WPoint::single(p.clone());
        let inner = ctx.inner_branch(0.0, &w)?;
        Ok(w_dist(&outside, &inner)?.max(w_dist(&ctx.beta(&p)?, &inner)?))
    });
    let t1 = run_trials(cfg, 13, |rng, _| {
        let w = boundary(rng)?;
        let inner = ctx.inner_branch(1.0, &w)?;
        let graft = ctx.graft_branch(1.0, &w)?;
        Ok(w_dist(&inner, &graft)?.max(w_dist(&ctx.beta(&collar_apply(1.0, &w)?)?, &inner)?))
    });
    let t0_probe = run_trials(cfg, 14, |rng, _| {
        let w = boundary(rng)?;
        let outside = ctx.beta(&extended_collar(-eps, &w))?;
        let inside = ctx.beta(&collar_apply(eps, &w)?)?;
        w_realization_distance(&outside, &inside)
    });
    let t1_probe = run_trials(cfg, 15, |rng, _| {
        let w = boundary(rng)?;
        let below = ctx.beta(&collar_apply(1.0 - eps, &w)?)?;
        let above = ctx.beta(&collar_apply(1.0 + eps, &w)?)?;
        w_realization_distance(&below, &above)
    });
    let mut parts = vec![
        Report::from_outcomes("seam t=0", t_seam, t0),
        Report::from_outcomes("seam t=1", t_seam, t1),
        Report::from_outcomes("probe t=0", t_probe, t0_probe),
        Report::from_outcomes("probe t=1", t_probe, t1_probe),
    ];

    if cfg.k >= 4 {
        let s0 = run_trials(cfg, 16, |rng, _| {
            let probe = SeamProbe::sample(rng, cfg)?;
            let t = rng.random_range(1.0..=2.0);
            let x = collar_apply(0.0, &probe.z)?;
            let case0 = probe.beta_with(t, WPoint::single(x.clone()))?;
            let case1 = probe.beta_with(t, ctx.case_inner(0.0, t, &probe.z)?)?;
            let actual = ctx.beta(&collar_apply(t, &probe.point(&x)?)?)?;
            Ok(w_dist(&case0, &case1)?.max(w_dist(&actual, &case1)?))
        });
        let s1 = run_trials(cfg, 17, |rng, _| {
            let probe = SeamProbe::sample(rng, cfg)?;
            let t = rng.random_range(1.0..=2.0);
            let x = collar_apply(1.0, &probe.z)?;
            let case1 = probe.beta_with(t, ctx.case_inner(1.0, t, &probe.z)?)?;
            let case2 = probe.beta_with(t, ctx.case_outer(1.0, t, &probe.z)?)?;
            let actual = ctx.beta(&collar_apply(t, &probe.point(&x)?)?)?;
            Ok(w_dist(&case1, &case2)?.max(w_dist(&actual, &case1)?))
        });
        let s_probe = |salt: u64, s: f64| {
            run_trials(cfg, salt, move |rng, _| {
                let probe = SeamProbe::sample(rng, cfg)?;
                let t = rng.random_range(1.0..=2.0);
                let frag = |s: f64| {
                    if s >= 0.0 {
                        collar_apply(s, &probe.z)
                    } else {
                        Ok(extended_collar(s, &probe.z))
                    }
                };
                let below = ctx.beta(&collar_apply(t, &probe.point(&frag(s - eps)?)?)?)?;
                let above = ctx.beta(&collar_apply(t, &probe.point(&frag(s + eps)?)?)?)?;
                w_realization_distance(&below, &above)
            })
        };
        parts.push(Report::from_outcomes("seam s=0", t_seam, s0));
        parts.push(Report::from_outcomes("seam s=1", t_seam, s1));
        parts.push(Report::from_outcomes("probe s=0", t_probe, s_probe(18, 0.0)));
        parts.push(Report::from_outcomes("probe s=1", t_probe, s_probe(19, 1.0)));
    }
    Ok(Report::combine("check-seams", parts))
}

/// Computing `β(c(t, w))` by cutting only some of the zero edges of `w` (the
/// remaining ones stay inside boundary fragments) gives the same tree, for
/// every nonempty subset of zero edges.
pub fn decomposition_order(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    need_boundary(cfg, "decomposition order")?;
    let ctx = BetaContext::new(cfg.n, cfg.rho0)?;
    let outcomes = run_trials(cfg, 20, |rng, _| {
        let w = sample_with(rng, cfg.n, cfg.k, cfg.rho0, Region::Boundary)?;
        let t = rng.random_range(1.0..=2.0);
        let direct = ctx.beta(&collar_apply(t, &w)?)?;
        let indexed = {
            let mut idx = 0usize;
            w.root().map_ref(&mut |x: &NormalizedConfig| x.clone(), &mut |u: &f64| {
                idx += 1;
                (idx - 1, *u)
            })
        };
        let zeros: Vec<usize> = w
            .edge_u()
            .iter()
            .enumerate()
            .filter(|(_, u)| **u == 0.0)
            .map(|(i, _)| i)
            .collect();
        let mut worst: f64 = 0.0;
        for mask in 1u32..(1 << zeros.len()) {
            let chosen = |i: usize| {
                zeros
                    .iter()
                    .position(|&z| z == i)
                    .is_some_and(|j| mask & (1 << j) != 0)
            };
            let (skeleton, frags) = indexed.cut(&|(i, _): &(usize, f64)| chosen(*i));
            let frags: Vec<FmPoint> = frags
                .into_iter()
                .map(|f| {
                    let root = f.map_ref(&mut |x| x.clone(), &mut |(_, u)| *u);
                    FmPoint::new(cfg.rho0, root)
                })
                .collect::<Result<_>>()?;
            let split = ctx.graft_fragments(t, &skeleton.shape(), &frags)?;
            worst = worst.max(w_dist(&split, &direct)?);
        }
        Ok(worst)
    });
    Ok(Report::from_outcomes("decomposition-order", cfg.tol(tol::EQUIVARIANCE), outcomes))
}

/// Fragment outputs land in disjoint collar-time ranges: case (1) labels
/// have time in `[0, t]`, single-vertex case (2) labels in `(t, 2]`, and
/// case (0) labels lie outside the collar image.
pub fn case_ranges(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    need_boundary(cfg, "case ranges")?;
    let ctx = BetaContext::new(cfg.n, cfg.rho0)?;
    let outcomes = run_trials(cfg, 21, |rng, _| {
        let w = sample_with(rng, cfg.n, cfg.k, cfg.rho0, Region::Boundary)?;
        let t = rng.random_range(1.0..=2.0);
        let (_, frags) = w.boundary_fragments();
        for x in &frags {
            let out = ctx.fragment_tree(x, t)?;
            let time = out.single_label().and_then(collar_invert).map(|(tau, _)| tau);
            let ok = match (BetaContext::fragment_case(x), out.single_label(), time) {
                (FragmentCase::Outside, Some(_), None) => true,
                (FragmentCase::Inner, Some(_), Some(tau)) => (0.0..=t).contains(&tau),
                (FragmentCase::Outer, Some(_), Some(tau)) => tau > t && tau <= 2.0,
                (FragmentCase::Outer, None, _) => true,
                _ => false,
            };
            if !ok {
                return Ok(f64::INFINITY);
            }
        }
        Ok(0.0)
    });
    Ok(Report::from_outcomes("case-ranges", 0.0, outcomes))
}

/// `β_2` is the identity, the sphere parameter has unit length, and the
/// transposition and `−I` both act by the antipode, exactly.
pub fn base_case(cfg: &RunConfig) -> Result<Report> {
    let cfg = cfg.with_k(2);
    cfg.validate()?;
    let ctx = BetaContext::new(cfg.n, cfg.rho0)?;
    let swap = Permutation::from_images(vec![2, 1])?;
    let outcomes = run_trials(&cfg, 22, |rng, _| {
        let p = sample_with(rng, cfg.n, 2, cfg.rho0, Region::Interior)?;
        if ctx.beta(&p)? != WPoint::single(p.clone()) {
            return Ok(f64::INFINITY);
        }
        let x = &p.vertex_configs()[0].clone();
        let v = x.sphere_param()?;
        let unit = (v.norm() - 1.0).abs();
        let swapped = p.act_perm(&swap)?.vertex_configs()[0].sphere_param()?;
        let minus = GroupElement::from_orthogonal(2, -nalgebra::DMatrix::identity(cfg.n, cfg.n))?;
        let reflected = p.act(&minus)?.vertex_configs()[0].sphere_param()?;
        if swapped != -&v || reflected != -&v {
            return Ok(f64::INFINITY);
        }
        Ok(unit)
    });
    Ok(Report::from_outcomes("base-case", cfg.tol(tol::SPHERE), outcomes))
}

/// Every non-identity permutation moves every sampled point by more than
/// the freeness threshold.
pub fn freeness(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let perms: Vec<Permutation> = Permutation::all(cfg.k)
        .into_iter()
        .filter(|s| !s.is_identity())
        .collect();
    let regions = regions_at(cfg.k);
    let threshold = cfg.tol(tol::FREENESS);
    let outcomes = run_trials(cfg, 23, |rng, i| {
        let p = sample_with(rng, cfg.n, cfg.k, cfg.rho0, regions[i % regions.len()])?;
        for s in &perms {
            let d = fm_dist(&p.act_perm(s)?, &p)?;
            if d <= threshold {
                return Err(crate::error::invariant(
                    "free action",
                    format!("permutation {:?} moves the point by only {d:e}", s.images()),
                ));
            }
        }
        Ok(0.0)
    });
    Ok(Report::from_outcomes("freeness", 0.0, outcomes))
}

/// Associativity and unit laws of composition in `F` and `WF`, checked on
/// the three relative positions of two partial compositions.
pub fn associativity(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let outcomes = run_trials(cfg, 24, |rng, _| {
        let ks: Vec<usize> = (0..3).map(|_| rng.random_range(2..=3)).collect();
        let xs = ks.iter().map(|&k| any_sample(rng, cfg, k)).collect::<Result<Vec<_>>>()?;
        let ws = ks
            .iter()
            .map(|&k| sample_w_with(rng, cfg.n, k, cfg.rho0))
            .collect::<Result<Vec<_>>>()?;
        let (k1, k2, k3) = (ks[0], ks[1], ks[2]);
        let i = rng.random_range(1..=k1);
        let j = rng.random_range(1..=k1 + k2 - 1);
        let fm_lhs = compose_at(&compose_at(&xs[0], i, &xs[1])?, j, &xs[2])?;
        let w_lhs = w_compose_at(&w_compose_at(&ws[0], i, &ws[1])?, j, &ws[2])?;
        let (fm_rhs, w_rhs) = if j < i {
            (
                compose_at(&compose_at(&xs[0], j, &xs[2])?, i + k3 - 1, &xs[1])?,
                w_compose_at(&w_compose_at(&ws[0], j, &ws[2])?, i + k3 - 1, &ws[1])?,
            )
        } else if j < i + k2 {
            (
                compose_at(&xs[0], i, &compose_at(&xs[1], j - i + 1, &xs[2])?)?,
                w_compose_at(&ws[0], i, &w_compose_at(&ws[1], j - i + 1, &ws[2])?)?,
            )
        } else {
            (
                compose_at(&compose_at(&xs[0], j - k2 + 1, &xs[2])?, i, &xs[1])?,
                w_compose_at(&w_compose_at(&ws[0], j - k2 + 1, &ws[2])?, i, &ws[1])?,
            )
        };
        let unit = w_compose(&NestedTree::corolla(k1)?, &[ws[0].clone()])?;
        Ok(fm_dist(&fm_lhs, &fm_rhs)?
            .max(w_dist(&w_lhs, &w_rhs)?)
            .max(w_dist(&unit, &ws[0])?))
    });
    Ok(Report::from_outcomes("associativity", 0.0, outcomes))
}

/// Operad axioms for `F` and `WF`, collar exactness, the operad-morphism
/// property of `β` for `k₁, k₂ ∈ {2, 3}`, the max-length law, decomposition
/// independence, case ranges and the chart round trip.
pub fn axioms(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut parts = vec![associativity(cfg)?];
    for k1 in 2..=3 {
        for k2 in 2..=3 {
            parts.push(operad_morphism(cfg, k1, k2)?);
        }
    }
    parts.push(chart_round_trip(cfg)?);
    parts.push(base_case(cfg)?);
    if cfg.k >= 3 {
        parts.push(collar_exactness(cfg)?);
        parts.push(max_length_law(cfg)?);
        parts.push(decomposition_order(cfg)?);
        parts.push(case_ranges(cfg)?);
    }
    Ok(Report::combine("check-axioms", parts))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrataReport {
    pub k: usize,
    pub count: usize,
    /// `by_codimension[c]` counts trees with `c` internal edges.
    pub by_codimension: Vec<usize>,
    pub trees: Vec<NestedTree>,
}

/// All strata of `F(k)`, that is all nested trees on `k` leaves.
pub fn strata(k: usize) -> Result<StrataReport> {
    let trees = enumerate_trees(k)?;
    let mut by_codimension = vec![0; k.saturating_sub(1)];
    for t in &trees {
        by_codimension[t.edge_count()] += 1;
    }
    Ok(StrataReport {
        k,
        count: trees.len(),
        by_codimension,
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(k: usize) -> RunConfig {
        RunConfig::new(2, k, 11, 20)
    }

    #[test]
    fn report_counts() {
        let r = Report::from_outcomes(
            "x",
            1e-3,
            vec![Ok(1e-4), Ok(1e-2), Err(Error::NotBoundary), Ok(0.0)],
        );
        assert_eq!((r.passed, r.failed, r.trials), (2, 2, 4));
        assert_eq!(r.max_error, 1e-2);
        assert_eq!(r.failures.len(), 2);
        let c = Report::combine("y", vec![r.clone(), r]);
        assert_eq!((c.passed, c.failed, c.trials), (4, 4, 8));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = roundtrip(&small(4)).unwrap();
        let b = roundtrip(&small(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.ok(), "{a:?}");
    }

    #[test]
    fn suites_pass_on_small_runs() {
        for k in 3..=5 {
            let cfg = small(k);
            for r in [
                equivariance(&cfg).unwrap(),
                axioms(&cfg).unwrap(),
                seams(&cfg).unwrap(),
                freeness(&cfg).unwrap(),
            ] {
                assert!(r.ok(), "{}", serde_json::to_string_pretty(&r).unwrap());
            }
        }
    }

    #[test]
    fn strata_of_three() {
        let s = strata(3).unwrap();
        assert_eq!(s.count, 4);
        assert_eq!(s.by_codimension, vec![1, 3]);
    }
}
