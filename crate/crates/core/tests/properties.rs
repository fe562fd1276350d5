use proptest::prelude::*;
use ranapprox::detapprox::{sigma_sq, top_n_indices};
use ranapprox::gaussfield::dudley_bound;
use ranapprox::harness::DataSeries;
use ranapprox::kernel::DecayProfile;
use ranapprox::model::{LambdaSequence, MultiIndex};
use ranapprox::rng::seeded;
use ranapprox::seqspace::{mathe_sketch, SketchConfig};

fn explicit_lambda() -> impl Strategy<Value = LambdaSequence> {
    proptest::collection::vec(0.05f64..1.0, 1..6).prop_map(|v| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        LambdaSequence::explicit(v.into_iter().map(|x| x / norm).collect()).unwrap()
    })
}

fn korobov_lambda() -> impl Strategy<Value = LambdaSequence> {
    (0.6f64..3.0, 0.05f64..0.95).prop_map(|(r, b0)| LambdaSequence::normalize_korobov(r, b0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn selection_is_ordered_and_prefix_stable(l in prop_oneof![explicit_lambda(), korobov_lambda()], d in 1usize..4, n in 1usize..60) {
        let big = top_n_indices(&l, d, n + 10);
        let small = top_n_indices(&l, d, n);
        prop_assert_eq!(small.indices(), &big.indices()[..small.len()]);
        for w in big.indices().windows(2) {
            let (a, b) = (sigma_sq(&l, &w[0]), sigma_sq(&l, &w[1]));
            prop_assert!(a > b || (a == b && w[0] < w[1]));
        }
        prop_assert!(big.captured_mass() <= l.total_mass().powi(d as i32) + 1e-12);
        let mut seen = std::collections::HashSet::new();
        prop_assert!(big.indices().iter().all(|k| seen.insert(k.clone())));
    }

    #[test]
    fn explicit_selection_matches_brute_force(l in explicit_lambda(), d in 1usize..3) {
        let kmax = l.max_frequency().unwrap() as i32;
        let mut all: Vec<MultiIndex> = Vec::new();
        let side = 2 * kmax + 1;
        for code in 0..side.pow(d as u32) {
            let mut c = code;
            let k: Vec<i32> = (0..d).map(|_| { let v = c % side - kmax; c /= side; v }).collect();
            let k = MultiIndex::from(k);
            if sigma_sq(&l, &k) > 0.0 {
                all.push(k);
            }
        }
        all.sort_by(|a, b| sigma_sq(&l, b).total_cmp(&sigma_sq(&l, a)).then_with(|| a.cmp(b)));
        let sel = top_n_indices(&l, d, all.len() + 5);
        prop_assert_eq!(sel.indices(), &all[..]);
    }

    #[test]
    fn dudley_monotone_in_alpha(a in 0.1f64..20.0, scale in 1.0f64..4.0, r0 in 0.05f64..0.5, p in 0.2f64..1.0, d in 1usize..12) {
        let lo = dudley_bound(&DecayProfile::new(p, a, r0).unwrap(), d).unwrap();
        let hi = dudley_bound(&DecayProfile::new(p, a * scale, r0).unwrap(), d).unwrap();
        prop_assert!(lo.is_finite() && lo > 0.0);
        prop_assert!(hi >= lo * (1.0 - 1e-6));
    }

    #[test]
    fn sketch_is_linear(x in proptest::collection::vec(-2.0f64..2.0, 5), y in proptest::collection::vec(-2.0f64..2.0, 5), a in -3.0f64..3.0, seed: u64) {
        let cfg = SketchConfig::new(5, 7, 2.0, seed).unwrap();
        let z: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + v).collect();
        let sz = mathe_sketch(&z, &cfg, &mut seeded(seed)).unwrap();
        let sx = mathe_sketch(&x, &cfg, &mut seeded(seed)).unwrap();
        let sy = mathe_sketch(&y, &cfg, &mut seeded(seed)).unwrap();
        for i in 0..5 {
            let want = a * sx[i] + sy[i];
            prop_assert!((sz[i] - want).abs() <= 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn dat_output_round_trips(rows in proptest::collection::vec((any::<f64>(), any::<f64>()), 1..20)) {
        let rows: Vec<(f64, f64)> = rows.into_iter().filter(|(a, b)| a.is_finite() && b.is_finite()).collect();
        let mut s = DataSeries::new(["a", "b"]);
        for (a, b) in &rows {
            s.push(vec![*a, *b], "test").unwrap();
        }
        let parsed: Vec<(f64, f64)> = s
            .to_dat()
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split(' ').map(|v| v.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        prop_assert_eq!(parsed, rows);
    }
}
