use homs::oracle::{eps_dense, solve_exhaustive};
use homs::reconstruct::segment_objective;
use homs::{
    fit_segment_spline, functional_value, reconstruct, solve, ErrorEngine, ModelParams, Partition, Pruning,
    RotationTable, Segment, Signal,
};
use proptest::prelude::*;

const INF: f64 = f64::INFINITY;

fn values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 1..=max_len)
}

fn beta() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.5, 1.0, 5.0, INF])
}

fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    let d = (a - b).abs();
    d <= abs || d <= rel * a.abs().max(b.abs())
}

fn energy_of(f: &Signal, part: &Partition, params: &ModelParams) -> f64 {
    part.iter()
        .map(|s| eps_dense(f, s.left, s.right, params.k, params.beta).unwrap() + params.gamma)
        .sum()
}

/// Moves the left boundary of every short non-leftmost segment so it has `k`
/// samples, merging with the left neighbour when that one runs out.
fn normalize(part: &Partition, k: usize) -> Partition {
    let mut lens: Vec<usize> = part.iter().map(Segment::len).collect();
    let mut i = lens.len() - 1;
    while i > 0 {
        if lens[i] < k {
            let need = k - lens[i];
            if lens[i - 1] > need {
                lens[i - 1] -= need;
                lens[i] = k;
            } else {
                lens[i] += lens[i - 1];
                lens.remove(i - 1);
            }
        }
        i -= 1;
    }
    Partition::from_lengths(&lens).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_dense(v in values(40), k in 1usize..=4, b in beta()) {
        let f = Signal::new(v).unwrap();
        let n = f.len();
        let table = RotationTable::for_params(&ModelParams::new(k, b, 1.0).unwrap(), n).unwrap();
        let engine = ErrorEngine::new(&table, &f).unwrap();
        for l in 1..=n {
            let row = engine.errors_from(l).unwrap();
            for r in l..=n {
                let dense = eps_dense(&f, l, r, k, b).unwrap();
                let abs = if dense.abs() < 1e-6 { 1e-10 } else { 0.0 };
                prop_assert!(close(row[r - l], dense, 1e-8, abs), "l={} r={} {} vs {}", l, r, row[r - l], dense);
            }
        }
    }

    #[test]
    fn errors_nested_and_superadditive(v in values(30), k in 1usize..=3, b in beta()) {
        let f = Signal::new(v).unwrap();
        let n = f.len();
        let table = RotationTable::for_params(&ModelParams::new(k, b, 1.0).unwrap(), n).unwrap();
        let engine = ErrorEngine::new(&table, &f).unwrap();
        let e: Vec<Vec<f64>> = (1..=n).map(|l| engine.errors_from(l).unwrap()).collect();
        let at = |l: usize, r: usize| e[l - 1][r - l];
        let slack = 1e-12 * f.norm_sq();
        for l in 1..=n {
            for r in l..=n {
                if r > l {
                    prop_assert!(at(l, r - 1) <= at(l, r) + slack);
                    prop_assert!(at(l + 1, r) <= at(l, r) + slack);
                }
                for s in l..r {
                    prop_assert!(at(l, s) + at(s + 1, r) <= at(l, r) + slack);
                }
            }
        }
    }

    #[test]
    fn dense_oracle_nested_and_superadditive(v in values(12), k in 1usize..=3, b in beta()) {
        let f = Signal::new(v).unwrap();
        let n = f.len();
        let slack = 1e-10 * f.norm_sq().max(1.0);
        for l in 1..=n {
            for r in l..=n {
                let whole = eps_dense(&f, l, r, k, b).unwrap();
                if l > 1 {
                    prop_assert!(whole <= eps_dense(&f, l - 1, r, k, b).unwrap() + slack);
                }
                for s in l..r {
                    let split = eps_dense(&f, l, s, k, b).unwrap() + eps_dense(&f, s + 1, r, k, b).unwrap();
                    prop_assert!(split <= whole + slack);
                }
            }
        }
    }

    #[test]
    fn dp_is_globally_optimal(
        v in values(11),
        k in 1usize..=3,
        b in prop::sample::select(vec![1.0, 5.0, INF]),
        gamma in prop::sample::select(vec![0.01, 0.1, 1.0]),
    ) {
        let f = Signal::new(v).unwrap();
        let params = ModelParams::new(k, b, gamma).unwrap();
        let dp = solve(&f, &params, Pruning::Both).unwrap();
        let ex = solve_exhaustive(&f, &params).unwrap();
        prop_assert!(close(dp.energy, ex.energy, 1e-9, 0.0), "{} vs {}", dp.energy, ex.energy);
        prop_assert!(close(energy_of(&f, &dp.partition, &params), dp.energy, 1e-9, 1e-12));
    }

    #[test]
    fn exhaustive_beats_any_partition(v in values(10), cuts in prop::collection::vec(any::<bool>(), 9), gamma in 0.01f64..1.0) {
        let f = Signal::new(v).unwrap();
        let n = f.len();
        let params = ModelParams::new(2, 1.0, gamma).unwrap();
        let starts: Vec<usize> = (2..=n).filter(|s| cuts[s - 2]).collect();
        let part = Partition::from_starts(&starts, n).unwrap();
        let ex = solve_exhaustive(&f, &params).unwrap();
        prop_assert!(ex.energy <= energy_of(&f, &part, &params) + 1e-12);
    }

    #[test]
    fn pruning_modes_agree(v in values(150), k in 1usize..=4, b in beta(), gamma in 0.001f64..2.0) {
        let f = Signal::new(v).unwrap();
        let n = f.len() as u64;
        let params = ModelParams::new(k, b, gamma).unwrap();
        let none = solve(&f, &params, Pruning::None).unwrap();
        prop_assert_eq!(none.num_error_updates, n * (n - 1) / 2);
        for p in [Pruning::Both, Pruning::AmpOnly, Pruning::KfOnly] {
            let res = solve(&f, &params, p).unwrap();
            prop_assert!(close(res.energy, none.energy, 1e-12, 0.0));
            prop_assert!(res.num_error_updates <= none.num_error_updates);
        }
    }

    #[test]
    fn short_segments_only_leftmost(v in values(40), k in 2usize..=4, b in beta(), gamma in 0.001f64..0.5) {
        let f = Signal::new(v).unwrap();
        let params = ModelParams::new(k, b, gamma).unwrap();
        let res = solve(&f, &params, Pruning::Both).unwrap();
        let norm = normalize(&res.partition, k);
        prop_assert!(norm.iter().skip(1).all(|s| s.len() >= k));
        prop_assert!(energy_of(&f, &norm, &params) <= res.energy + 1e-10 * res.energy.max(1.0));
    }

    #[test]
    fn energy_identity(v in values(120), k in 1usize..=4, b in beta(), gamma in 0.001f64..2.0) {
        let f = Signal::new(v).unwrap();
        let params = ModelParams::new(k, b, gamma).unwrap();
        let res = solve(&f, &params, Pruning::Both).unwrap();
        let fu: f64 = f.as_slice().iter().zip(res.estimate.as_slice()).map(|(a, b)| a * b).sum();
        let lemma = f.norm_sq() - fu + gamma * res.partition.len() as f64;
        prop_assert!(close(res.energy, lemma, 1e-8, 0.0));
        let direct = functional_value(&f, &res.estimate, &res.partition, &params).unwrap();
        prop_assert!(close(res.energy, direct, 1e-8, 0.0));
    }

    #[test]
    fn fit_objective_matches_error(v in values(60), k in 1usize..=4, b in beta()) {
        let f = Signal::new(v).unwrap();
        let n = f.len();
        let params = ModelParams::new(k, b, 1.0).unwrap();
        let u = reconstruct(&f, &Partition::single(n), &params).unwrap();
        let obj = segment_objective(f.as_slice(), u.as_slice(), k, b).unwrap();
        let table = RotationTable::for_params(&params, n).unwrap();
        let e = ErrorEngine::new(&table, &f).unwrap().error(1, n).unwrap();
        prop_assert!(close(obj, e, 1e-9, 1e-10), "{} vs {}", obj, e);
    }

    #[test]
    fn spline_fit_is_linear(
        (x, y) in (1usize..50).prop_flat_map(|n| (prop::collection::vec(-3.0f64..3.0, n), prop::collection::vec(-3.0f64..3.0, n))),
        alpha in -4.0f64..4.0,
        k in 1usize..=4,
        b in prop::sample::select(vec![0.5, 1.0, 5.0]),
    ) {
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, c)| alpha * a + c).collect();
        let sx = fit_segment_spline(&x, k, b).unwrap();
        let sy = fit_segment_spline(&y, k, b).unwrap();
        let sc = fit_segment_spline(&combo, k, b).unwrap();
        for i in 0..x.len() {
            prop_assert!((sc[i] - (alpha * sx[i] + sy[i])).abs() <= 1e-10 * (1.0 + alpha.abs()) * 10.0);
        }
    }

    #[test]
    fn spline_fit_contracts(v in values(80), k in 1usize..=4, b in prop::sample::select(vec![0.5, 1.0, 5.0, 50.0])) {
        let u = fit_segment_spline(&v, k, b).unwrap();
        let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nf: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(nu <= nf + 1e-10 * nf);
    }
}
