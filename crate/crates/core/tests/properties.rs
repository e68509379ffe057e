use fmw_core::beta::BetaContext;
use fmw_core::checks::tol;
use fmw_core::collar::{collar_apply, collar_invert};
use fmw_core::config::{centroid, normalize, spread, Point};
use fmw_core::fm::{approx_eq, random_tree, sample_with, Region, DEFAULT_RHO0};
use fmw_core::group::{GroupElement, Permutation};
use fmw_core::json;
use fmw_core::tree::NestedTree;
use fmw_core::w::{reassemble, sample_w_with, w_approx_eq};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn region() -> impl Strategy<Value = Region> {
    prop_oneof![
        Just(Region::Interior),
        Just(Region::Collar),
        Just(Region::Boundary),
        Just(Region::Mixed),
    ]
}

fn raw_points() -> impl Strategy<Value = Vec<Point>> {
    (1usize..=3, 2usize..=6).prop_flat_map(|(n, k)| {
        prop::collection::vec(prop::collection::vec(-10.0f64..10.0, n), k)
            .prop_map(|pts| pts.into_iter().map(DVector::from_vec).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_is_centered_unit_and_affine_invariant(
        pts in raw_points(),
        shift in -5.0f64..5.0,
        scale in 0.1f64..10.0,
    ) {
        let Ok(x) = normalize(&pts) else { return Ok(()) };
        prop_assert!(centroid(x.points()).norm() < 1e-12);
        prop_assert!((spread(x.points()) - 1.0).abs() < 1e-12);
        let moved: Vec<Point> = pts.iter().map(|p| p.map(|c| c * scale + shift)).collect();
        let y = normalize(&moved).unwrap();
        for (a, b) in x.points().iter().zip(y.points()) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn action_composes(seed: u64, n in 1usize..=3, k in 2usize..=5) {
        let mut r = rng(seed);
        let region = if Region::Mixed.exists_at(k) { Region::Mixed } else { Region::Interior };
        let p = sample_with(&mut r, n, k, DEFAULT_RHO0, region).unwrap();
        let g = GroupElement::random(k, n, &mut r);
        let h = GroupElement::random(k, n, &mut r);
        let both = p.act(&g.compose(&h)).unwrap();
        let stepwise = p.act(&h).unwrap().act(&g).unwrap();
        prop_assert!(approx_eq(&both, &stepwise, 1e-12).unwrap());
        let back = p.act(&g).unwrap().act(&g.inverse()).unwrap();
        prop_assert!(approx_eq(&back, &p, 1e-12).unwrap());
    }

    #[test]
    fn tree_grafting_is_associative(seed: u64, ka in 2usize..=4, kb in 2usize..=4, kc in 2usize..=4) {
        let mut r = rng(seed);
        let a = random_tree(&mut r, ka);
        let b = random_tree(&mut r, kb);
        let c = random_tree(&mut r, kc);
        for i in 1..=ka {
            for j in 1..=kb {
                let (ab, _) = a.graft(i, &b).unwrap();
                let (left, _) = ab.graft(i + j - 1, &c).unwrap();
                let (bc, _) = b.graft(j, &c).unwrap();
                let (right, _) = a.graft(i, &bc).unwrap();
                prop_assert_eq!(left.key(), right.key());
            }
        }
    }

    #[test]
    fn tree_key_ignores_child_order(seed: u64, k in 2usize..=7) {
        let t = random_tree(&mut rng(seed), k);
        let reparsed = NestedTree::parse(&reversed(&t.to_string())).unwrap();
        prop_assert_eq!(reparsed.key(), t.key());
        let sigma = Permutation::random(k, &mut rng(seed ^ 1));
        let there = t.act_perm(&sigma).unwrap();
        prop_assert_eq!(there.act_perm(&sigma.inverse()).unwrap().key(), t.key());
    }

    #[test]
    fn collar_inverts(seed: u64, n in 1usize..=3, k in 3usize..=5, t in 0.0f64..=2.0) {
        let x = sample_with(&mut rng(seed), n, k, DEFAULT_RHO0, Region::Boundary).unwrap();
        let y = collar_apply(t, &x).unwrap();
        let (t2, x2) = collar_invert(&y).unwrap();
        prop_assert!((t - t2).abs() < tol::COLLAR_INVERSE);
        prop_assert!(approx_eq(&x, &x2, tol::COLLAR_INVERSE).unwrap());
    }

    #[test]
    fn beta_round_trips(seed: u64, n in 1usize..=3, k in 2usize..=5, region in region()) {
        prop_assume!(region.exists_at(k));
        let p = sample_with(&mut rng(seed), n, k, DEFAULT_RHO0, region).unwrap();
        let ctx = BetaContext::for_point(&p);
        let back = ctx.beta_inverse(&ctx.beta(&p).unwrap()).unwrap();
        prop_assert!(approx_eq(&back, &p, tol::ROUND_TRIP).unwrap());
        let w = sample_w_with(&mut rng(seed), n, k, DEFAULT_RHO0).unwrap();
        let again = ctx.beta(&ctx.beta_inverse(&w).unwrap()).unwrap();
        prop_assert!(w_approx_eq(&again, &w, tol::ROUND_TRIP).unwrap());
    }

    #[test]
    fn cutting_max_edges_reassembles(seed: u64, n in 1usize..=2, k in 3usize..=6) {
        let w = sample_w_with(&mut rng(seed), n, k, DEFAULT_RHO0).unwrap();
        let Some(max) = w.max_length() else { return Ok(()) };
        let (skeleton, parts) = w.cut_max_edges().unwrap();
        prop_assert!(parts.iter().all(|p| p.max_length().is_none_or(|m| m < max)));
        prop_assert_eq!(reassemble(&skeleton, &parts, max).unwrap(), w);
    }

    #[test]
    fn json_round_trips_exactly(seed: u64, n in 1usize..=3, k in 2usize..=5, region in region()) {
        prop_assume!(region.exists_at(k));
        let p = sample_with(&mut rng(seed), n, k, DEFAULT_RHO0, region).unwrap();
        prop_assert_eq!(json::fm_from_json(&json::fm_to_json(&p)).unwrap(), p);
        let w = sample_w_with(&mut rng(seed), n, k, DEFAULT_RHO0).unwrap();
        prop_assert_eq!(json::w_from_json(&json::w_to_json(&w)).unwrap(), w);
    }
}

fn reversed(s: &str) -> String {
    // reverse child order at every level by reversing the token stream and
    // swapping brackets; leaf numbers keep their digits
    let mut tokens: Vec<String> = Vec::new();
    let mut num = String::new();
    for c in s.chars() {
        if c.is_ascii_digit() {
            num.push(c);
            continue;
        }
        if !num.is_empty() {
            tokens.push(std::mem::take(&mut num));
        }
        match c {
            '[' => tokens.push("]".into()),
            ']' => tokens.push("[".into()),
            ',' => tokens.push(",".into()),
            _ => {}
        }
    }
    if !num.is_empty() {
        tokens.push(num);
    }
    tokens.reverse();
    tokens.concat()
}
