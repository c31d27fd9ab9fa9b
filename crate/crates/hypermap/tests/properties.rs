//! Property tests over randomly generated and sampled objects.

use hypermap::geodesics;
use hypermap::model::ModelParams;
use hypermap::planarmap::{PlanarMap, Source};
use hypermap::samplers::{disk_from_events, enumerate_transcripts, ReverseVariant, Rng, Sampler, StripVariant};
use hypermap::skeleton::{self, GeodesicTree, Mode, ReverseForest, SkeletonDecomposition};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    prop_oneof![Just(0.125), 0.02f64..0.24, Just(0.25)].prop_map(|h| ModelParams::from_h(h).unwrap())
}

/// Random admissible-or-not forests: `q` roots and a few levels of counts.
fn forests() -> impl Strategy<Value = ReverseForest> {
    (
        1usize..5,
        prop::collection::vec(prop::collection::vec(0u32..4, 1..6), 1..4),
        any::<prop::sample::Index>(),
    )
        .prop_filter_map("empty level", |(q, raw, idx)| {
            // Grow downwards: level sizes follow from the counts.
            let mut levels = vec![];
            let mut width = q;
            for row in raw {
                let counts: Vec<u32> = (0..width).map(|i| row[i % row.len()]).collect();
                width = counts.iter().sum::<u32>() as usize;
                levels.push(counts);
                if width == 0 {
                    return None;
                }
            }
            levels.push(vec![0; width]);
            levels.reverse();
            ReverseForest::new(levels, idx.index(width)).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forest_text_round_trips(f in forests()) {
        prop_assert_eq!(ReverseForest::from_text(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn cylinder_codec_round_trips(f in forests(), seed in any::<u64>()) {
        let f = f.reordered_ball(f.height());
        let mut s = Sampler::new(ModelParams::from_h(0.125).unwrap());
        let mut rng = Rng::new(seed);
        let sk = SkeletonDecomposition::with_fillings(f, Mode::Cylinder, |p| s.sample_boltzmann_disk(&mut rng, p)).unwrap();
        let map = skeleton::decode(&sk).unwrap();
        prop_assert!(map.validate().passed());
        let back = skeleton::encode(&map).unwrap();
        prop_assert_eq!(&back, &sk);
        prop_assert_eq!(skeleton::decode(&back).unwrap(), map);
    }

    #[test]
    fn strip_codec_round_trips(f in forests(), seed in any::<u64>()) {
        // Strips have no distinguished bottom vertex; the codec normalises it to 0.
        let f = ReverseForest::new(f.levels().to_vec(), 0).unwrap();
        let mut s = Sampler::new(ModelParams::from_h(0.125).unwrap());
        let mut rng = Rng::new(seed);
        let sk = SkeletonDecomposition::with_fillings(f, Mode::Strip, |p| s.sample_boltzmann_disk(&mut rng, p)).unwrap();
        let strip = skeleton::decode_strip(&sk, usize::MAX).unwrap();
        prop_assert!(strip.map.validate().passed());
        prop_assert_eq!(skeleton::encode_strip(&strip).unwrap(), sk);
    }

    #[test]
    fn map_text_round_trips(p in 1usize..8, seed in any::<u64>(), params in params()) {
        let mut s = Sampler::new(params);
        let disk = s.sample_boltzmann_disk(&mut Rng::new(seed), p).unwrap();
        prop_assert_eq!(PlanarMap::from_text(&disk.to_text()).unwrap(), disk);
    }

    #[test]
    fn sampled_disks_are_valid(p in 1usize..12, seed in any::<u64>(), params in params()) {
        let mut s = Sampler::new(params);
        let disk = s.sample_boltzmann_disk(&mut Rng::new(seed), p).unwrap();
        prop_assert!(disk.validate().passed());
        prop_assert_eq!(disk.face_darts(disk.root()).len(), p);
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), r in 1u32..4) {
        let params = ModelParams::from_h(0.125).unwrap();
        let a = Sampler::new(params).sample_hull(&mut Rng::new(seed), r).unwrap();
        let b = Sampler::new(params).sample_hull(&mut Rng::new(seed), r).unwrap();
        prop_assert_eq!(a.map, b.map);
        prop_assert_eq!(a.skeleton.u, b.skeleton.u);
    }

    #[test]
    fn hulls_are_valid_and_slice_back(seed in any::<u64>(), r in 1u32..4) {
        let mut s = Sampler::new(ModelParams::from_h(0.125).unwrap());
        let hull = s.sample_hull(&mut Rng::new(seed), r).unwrap();
        prop_assert!(hull.map.validate().passed());
        prop_assert_eq!(hull.map.hole_degree(0), hull.perimeter());
        let dist = hull.map.distances(Source::Root).unwrap();
        // Top vertices are at distance r; filled-in regions may reach further.
        for d in hull.top_references() {
            prop_assert_eq!(dist.of_dart(d), r);
        }
        let tree = hull.geodesic_tree().unwrap();
        prop_assert_eq!(&tree, &hull.skeleton.u);
        let slices = geodesics::slice(&hull.map, &dist, &hull.geodesic_sources()).unwrap();
        prop_assert_eq!(geodesics::glue(&slices).unwrap(), hull.map.canonicalize());
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geodesic_tree_text_round_trips(seed in any::<u64>(), r in 1u32..6) {
        let mut s = Sampler::new(ModelParams::from_h(0.125).unwrap());
        let sk = s.sample_skeleton_f(&mut Rng::new(seed), r).unwrap();
        prop_assert_eq!(GeodesicTree::from_parens(&sk.u.to_parens()).unwrap(), sk.u.clone());
        prop_assert_eq!(sk.u.max_height(), r);
        prop_assert!(sk.forest.is_admissible());
    }

    #[test]
    fn strip_sides_are_geodesics(seed in any::<u64>(), r in 1u32..8, s1 in any::<bool>()) {
        let variant = if s1 { StripVariant::S1 } else { StripVariant::S0 };
        let mut s = Sampler::new(ModelParams::from_h(0.125).unwrap());
        let strip = s.sample_strip(&mut Rng::new(seed), variant, r).unwrap();
        prop_assert!(strip.map.validate().passed());
        let dist = strip.map.distances(Source::Root).unwrap();
        let bd = strip.boundary();
        let len = bd.len();
        for i in 0..=r as usize {
            prop_assert_eq!(dist.of_dart(bd[i]) as usize, i, "right side");
            prop_assert_eq!(dist.of_dart(bd[(len - i) % len]) as usize, i, "left side");
        }
    }

    #[test]
    fn reverse_balls_have_their_radius(seed in any::<u64>(), r in 0u32..8, tau1 in any::<bool>(), params in params()) {
        let variant = if tau1 { ReverseVariant::Tau1 } else { ReverseVariant::Tau0 };
        let mut s = Sampler::new(params);
        let ball = s.sample_reverse_tree(&mut Rng::new(seed), r, variant).unwrap();
        prop_assert_eq!(ball.height(), r as usize);
        prop_assert_eq!(ball.distinguished(), 0);
        if tau1 {
            prop_assert_eq!(ball.p(), 1);
        }
    }

    #[test]
    fn halfplane_balls_are_valid(seed in any::<u64>(), steps in 1usize..40) {
        let mut s = Sampler::new(ModelParams::from_h(0.125).unwrap());
        let ball = s.sample_halfplane_ball(&mut Rng::new(seed), steps).unwrap();
        prop_assert!(ball.map.validate().passed());
        prop_assert_eq!(ball.cases.len(), steps);
    }

    // Hyperbolic regime only: at criticality the law has a polynomial tail
    // that a finite truncation cannot capture to this accuracy.
    #[test]
    fn y_law_sums_to_one(r in 0u64..20, h in 0.02f64..0.24) {
        let params = ModelParams::from_h(h).unwrap();
        let pi = params.big_pi_series(2001);
        let total: f64 = (1..=2000).map(|p| params.y_probability_with_pi(r, p as u64, pi.coeff(p))).sum();
        prop_assert!((total - 1.0).abs() < 1e-6, "total {}", total);
    }

    #[test]
    fn iterates_are_increasing(r in 0u64..60, x in 0.0f64..1.0, params in params()) {
        prop_assert!(params.g_iter(r + 1, x) >= params.g_iter(r, x));
        prop_assert!(params.g_iter(r, x) <= 1.0);
    }
}

#[test]
fn transcripts_give_distinct_disks() {
    for p in 1..=4 {
        for n in 0..=2 {
            let mut seen = std::collections::HashSet::new();
            for t in enumerate_transcripts(p, n) {
                let d = disk_from_events(p, &t).unwrap();
                assert!(seen.insert(d.canonicalize()));
            }
        }
    }
}

#[test]
fn truncated_transcripts_are_rejected() {
    let t = &enumerate_transcripts(3, 1)[0];
    assert!(disk_from_events(3, &t[..t.len() - 1]).is_err());
    let mut longer = t.clone();
    longer.push(t[0]);
    assert!(disk_from_events(3, &longer).is_err());
}
