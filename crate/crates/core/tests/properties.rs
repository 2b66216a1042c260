use fgp::dimension::{box_dimension, capacity_dimension, energies, geometric_radii, graph_dimension, image_dimension};
use fgp::hitting::{hitting_probability, HittingExperiment, Process, Target};
use fgp::metric::{covering_number, packing_number, MetricSpec, Points};
use fgp::profiles::{ConditionId, ConditionParams, EllKind, Verdict};
use fgp::sets::{build_gauge_cantor, product_measure, verify_ahlfors_regularity, GaugeFunction, RegularityScale, WeightedSet};
use fgp::simulation::{stream_rng, volterra_simulate, SimulationGrid};
use fgp::VarianceProfile;
use proptest::prelude::*;
use rand::Rng;

fn profile_strategy() -> impl Strategy<Value = VarianceProfile> {
    prop_oneof![
        (0.05f64..=1.0).prop_map(|a| VarianceProfile::power(a).unwrap()),
        (0.55f64..3.0).prop_map(|b| VarianceProfile::logbm(b).unwrap()),
        (0.05f64..0.95).prop_map(|q| VarianceProfile::stretched_exp(q).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_is_strictly_increasing(p in profile_strategy(), u in 0.001f64..0.999, w in 0.001f64..0.999) {
        let dmax = p.domain_max();
        let (a, b) = (u.min(w) * dmax, u.max(w) * dmax);
        prop_assume!(b > a * (1.0 + 1e-9));
        prop_assert!(p.gamma(a).unwrap() < p.gamma(b).unwrap());
    }

    #[test]
    fn inverse_round_trips(p in profile_strategy(), u in 0.01f64..0.99) {
        let v = u * p.gamma_max();
        let l = p.inverse_log_scale(v).unwrap();
        prop_assert!((p.log_gamma(l) - v.ln()).abs() <= 1e-8, "{v} -> L = {l} -> {}", p.log_gamma(l).exp());
        match p.inverse(v) {
            Ok(x) => {
                let back = p.gamma(x).unwrap();
                prop_assert!((back - v).abs() <= 1e-8 * v, "{v} -> {x} -> {back}");
            }
            // only preimages below the smallest normal float may be refused
            Err(fgp::Error::Resolution(_)) => prop_assert!(l > -f64::MIN_POSITIVE.ln()),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn power_indexes_match(alpha in 0.05f64..=1.0) {
        let p = VarianceProfile::power(alpha).unwrap();
        let probes: Vec<f64> = (1..20).map(|k| 0.5f64.powi(k)).collect();
        let e = p.estimate_indexes(&probes).unwrap();
        prop_assert!(e.lower_index <= e.upper_index);
        prop_assert!((e.lower_index - alpha).abs() < 1e-3 && (e.upper_index - alpha).abs() < 1e-3);
    }

    #[test]
    fn condition_lattice(p in profile_strategy()) {
        let cp = ConditionParams::default();
        let c0 = p.check_condition(ConditionId::C0, &cp).unwrap().verdict;
        let bounded = p.check_condition(ConditionId::CEll(EllKind::Bounded), &cp).unwrap().verdict;
        prop_assert_eq!(c0, bounded);
        let eps: Vec<Verdict> = [0.25, 0.5, 0.75]
            .iter()
            .map(|e| p.check_condition(ConditionId::CEps(*e), &cp).unwrap().verdict)
            .collect();
        if c0 == Verdict::Holds {
            prop_assert!(eps.iter().all(|v| *v == Verdict::Holds));
        }
        // holding at some ε means holding at every larger ε
        if let Some(k) = eps.iter().position(|v| *v == Verdict::Holds) {
            prop_assert!(eps[k..].iter().all(|v| *v == Verdict::Holds), "{eps:?}");
        }
        let plus = p.check_condition(ConditionId::C0Plus, &cp).unwrap().verdict;
        if plus == Verdict::Holds {
            prop_assert!(eps.iter().all(|v| *v == Verdict::Holds));
        }
    }
}

fn random_points(metric: &MetricSpec, rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| match metric {
            MetricSpec::Euclidean => (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            MetricSpec::Product { space_dim, .. } => {
                let mut v = vec![rng.gen_range(0.0..0.5)];
                v.extend((0..*space_dim).map(|_| rng.gen_range(-1.0..1.0)));
                v
            }
            _ => vec![rng.gen_range(0.0..0.1)],
        })
        .collect()
}

#[test]
fn metric_axioms_on_random_triples() {
    let metrics = [
        MetricSpec::Euclidean,
        MetricSpec::gamma_delta(VarianceProfile::power(0.3).unwrap()),
        MetricSpec::gamma_delta(VarianceProfile::logbm(1.0).unwrap()),
        MetricSpec::gamma_delta(VarianceProfile::stretched_exp(0.5).unwrap()),
        MetricSpec::LogMetric,
        MetricSpec::product(MetricSpec::gamma_delta(VarianceProfile::power(0.8).unwrap()), 2).unwrap(),
    ];
    for (k, m) in metrics.iter().enumerate() {
        let mut rng = stream_rng(99, k as u64);
        for _ in 0..10_000 {
            let p = random_points(m, &mut rng, 3);
            let d = |i: usize, j: usize| m.distance(&p[i], &p[j]).unwrap();
            assert_eq!(d(0, 0), 0.0);
            assert!(d(0, 1) >= 0.0);
            assert_eq!(d(0, 1), d(1, 0), "{m}");
            assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12, "{m}: {p:?}");
        }
    }
}

#[test]
fn product_metric_dominates_its_parts() {
    let time = MetricSpec::gamma_delta(VarianceProfile::logbm(1.0).unwrap());
    let m = MetricSpec::product(time.clone(), 2).unwrap();
    let mut rng = stream_rng(3, 0);
    for _ in 0..2000 {
        let p = random_points(&m, &mut rng, 2);
        let rho = m.distance(&p[0], &p[1]).unwrap();
        assert!(rho >= time.distance(&p[0][..1], &p[1][..1]).unwrap());
        assert!(rho >= MetricSpec::Euclidean.distance(&p[0][1..], &p[1][1..]).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covering_packing_sandwich(seed in any::<u64>(), r in 0.01f64..0.3) {
        let mut rng = stream_rng(seed, 0);
        let coords: Vec<f64> = (0..400).map(|_| rng.gen_range(0.0..1.0)).collect();
        let pts = Points::new(2, coords).unwrap();
        let m = MetricSpec::Euclidean;
        prop_assert!(covering_number(&pts, &m, 2.0 * r).unwrap() <= packing_number(&pts, &m, r).unwrap());
        prop_assert!(packing_number(&pts, &m, r).unwrap() <= covering_number(&pts, &m, r).unwrap());
    }

    #[test]
    fn cantor_masses_are_conserved(s in 0.2f64..0.95, depth in 1u32..13) {
        let g = GaugeFunction::power(s).unwrap();
        let set = build_gauge_cantor(&g, depth, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        // dyadic masses add without rounding
        prop_assert_eq!(set.masses().iter().sum::<f64>(), 1.0);
        prop_assert_eq!(set.len(), 1usize << depth);
        let again = build_gauge_cantor(&g, depth, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        prop_assert_eq!(set, again);
    }

    #[test]
    fn product_masses_are_conserved(n1 in 1usize..40, n2 in 1usize..40) {
        let a = WeightedSet::interval(0.0, 1.0, n1, MetricSpec::Euclidean).unwrap();
        let b = WeightedSet::interval(2.0, 3.0, n2, MetricSpec::Euclidean).unwrap();
        let p = product_measure(&[a, b]).unwrap();
        prop_assert_eq!(p.len(), n1 * n2);
        prop_assert!((p.masses().iter().sum::<f64>() - 1.0).abs() <= 4.0 * (n1 * n2) as f64 * f64::EPSILON);
    }

    #[test]
    fn constructed_sets_are_gauge_regular(s in 0.3f64..0.9) {
        let g = GaugeFunction::power(s).unwrap();
        let set = build_gauge_cantor(&g, 14, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        let radii: Vec<f64> = (3..7).map(|k| 0.5f64.powf(k as f64 * 1.5 / s)).collect();
        let rep = verify_ahlfors_regularity(&set, RegularityScale::Alpha(s), &radii).unwrap();
        prop_assert!(rep.c <= 8.0, "{rep:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn energy_grows_with_order(s in 0.3f64..0.9, depth in 6u32..10) {
        let g = GaugeFunction::power(s).unwrap();
        let set = build_gauge_cantor(&g, depth, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        let betas: Vec<f64> = (0..8).map(|k| 0.1 * k as f64).collect();
        let e = energies(&set, &betas).unwrap();
        prop_assert!(e.windows(2).all(|w| w[1].value >= w[0].value), "{e:?}");
    }

    #[test]
    fn box_and_capacity_agree(s in 0.4f64..0.8) {
        let g = GaugeFunction::power(s).unwrap();
        let levels: Vec<WeightedSet> =
            (9..=12).map(|k| build_gauge_cantor(&g, k, MetricSpec::Euclidean, (0.0, 1.0)).unwrap()).collect();
        let deepest = levels.last().unwrap();
        let leaf = 0.5f64.powf(12.0 / s);
        let b = box_dimension(deepest, &geometric_radii(4.0 * leaf, 0.25, 20).unwrap()).unwrap();
        let betas: Vec<f64> = (0..9).map(|k| s - 0.3 + 0.075 * k as f64).collect();
        let c = capacity_dimension(&levels, &betas).unwrap();
        prop_assert!((b.value - c.value).abs() < 0.15, "box {} capacity {}", b.value, c.value);
        prop_assert!((b.value - s).abs() < 0.05);
    }

    #[test]
    fn subsets_have_smaller_box_dimension(s in 0.3f64..0.7) {
        let g = GaugeFunction::power(s).unwrap();
        let cantor = build_gauge_cantor(&g, 11, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        let interval = WeightedSet::interval(0.0, 1.0, 20_000, MetricSpec::Euclidean).unwrap();
        // stay above the resolution of both sets
        let r_min = (4.0 * 0.5f64.powf(11.0 / s)).max(8.0 / 20_000.0);
        let radii = geometric_radii(r_min, 0.2, 16).unwrap();
        let sub = box_dimension(&cantor, &radii).unwrap().value;
        let sup = box_dimension(&interval, &radii).unwrap().value;
        prop_assert!(sub <= sup + 0.05, "{sub} > {sup}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn image_below_graph_and_d(alpha in 0.3f64..0.95, d in 1usize..3, seed in 0u64..1000) {
        let p = VarianceProfile::power(alpha).unwrap();
        let grid = SimulationGrid::new(0.0, 1.0, 2048).unwrap();
        let ens = volterra_simulate(&p, grid.clone(), d, 4, seed).unwrap();
        let e = WeightedSet::on_times(&grid.times()[205..], MetricSpec::Euclidean).unwrap();
        let img = image_dimension(&ens, &e).unwrap();
        let gr = graph_dimension(&ens, &e, &p).unwrap();
        let tol = 0.1;
        prop_assert!(img.value <= gr.value + tol, "image {} graph {}", img.value, gr.value);
        prop_assert!(img.value <= d as f64 + tol);
    }

    #[test]
    fn hitting_is_monotone_in_radius_and_time_set(seed in 0u64..1000) {
        let grid = SimulationGrid::new(0.0, 1.0, 256).unwrap();
        let process = Process::new(VarianceProfile::power(0.7).unwrap(), 2, grid.clone()).unwrap();
        let times = grid.times();
        let exp = |from: usize| HittingExperiment {
            process: process.clone(),
            e: WeightedSet::on_times(&times[from..], MetricSpec::Euclidean).unwrap(),
            target: Target::Point(vec![0.3, 0.0]),
            radii: vec![0.3, 0.2, 0.1, 0.05],
            n_trials: 300,
            seed,
        };
        let wide = hitting_probability(&exp(26)).unwrap();
        let narrow = hitting_probability(&exp(128)).unwrap();
        // series run from the largest radius down
        prop_assert!(wide.series.windows(2).all(|w| w[0].hits >= w[1].hits));
        for (a, b) in wide.series.iter().zip(&narrow.series) {
            prop_assert!(b.hits <= a.hits);
        }
    }
}

#[test]
fn disjoint_seed_blocks_agree() {
    let grid = SimulationGrid::new(0.0, 1.0, 256).unwrap();
    let process = Process::new(VarianceProfile::power(0.5).unwrap(), 2, grid.clone()).unwrap();
    let run = |seed| {
        hitting_probability(&HittingExperiment {
            process: process.clone(),
            e: WeightedSet::on_times(&grid.times()[26..], MetricSpec::Euclidean).unwrap(),
            target: Target::Point(vec![0.5, 0.0]),
            radii: vec![0.2],
            n_trials: 4000,
            seed,
        })
        .unwrap()
        .frequency
    };
    let (a, b) = (run(1), run(2));
    let p = 0.5 * (a + b);
    assert!((a - b).abs() <= 4.0 * (2.0 * p * (1.0 - p) / 4000.0).sqrt(), "{a} vs {b}");
}

#[test]
fn ensembles_are_identical_across_thread_counts() {
    let p = VarianceProfile::logbm(1.0).unwrap();
    let grid = SimulationGrid::new(0.0, 0.5, 300).unwrap();
    let draw = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let ens = pool.install(|| volterra_simulate(&p, grid.clone(), 2, 64, 42).unwrap());
        let mut bytes = vec![];
        ens.write_binary(&mut bytes).unwrap();
        bytes
    };
    let one = draw(1);
    assert_eq!(one, draw(2));
    assert_eq!(one, draw(5));
}
