use ordgamma::{
    cubic, henon_coupled, jensen_shannon, logistic, series_distribution, white_noise, HenonParams, MapParams,
    SeriesEmbedding,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generators_are_pure(seed in any::<u64>(), eps in 0.0f64..=1.0) {
        let p = HenonParams::<f64>::new(eps, 300, seed);
        prop_assert_eq!(henon_coupled(&p).ok(), henon_coupled(&p).ok());
        let m = MapParams::<f64>::new(300, seed);
        prop_assert_eq!(logistic(&m).unwrap(), logistic(&m).unwrap());
        prop_assert_eq!(cubic(&m).unwrap(), cubic(&m).unwrap());
        prop_assert_eq!(white_noise::<f64>(300, seed), white_noise::<f64>(300, seed));
    }

    #[test]
    fn maps_stay_on_their_intervals(seed in any::<u64>()) {
        let m = MapParams::<f64>::new(2000, seed);
        prop_assert!(logistic(&m).unwrap().iter().all(|x| (0.0..=1.0).contains(x)));
        let bound = 2.0 / 3f64.sqrt() + 1e-12;
        prop_assert!(cubic(&m).unwrap().iter().all(|x| x.abs() <= bound));
    }
}

#[test]
fn henon_trajectories_stay_bounded() {
    let mut ok = 0;
    let mut total = 0;
    for eps in [0.0, 0.3, 0.6, 0.9] {
        for seed in 0..50 {
            total += 1;
            if let Ok(s) = henon_coupled(&HenonParams::<f64>::new(eps, 5000, seed)) {
                if s.driver.iter().chain(&s.response).all(|v| v.abs() < 10.0) {
                    ok += 1;
                }
            }
        }
    }
    assert!(ok as f64 >= 0.95 * total as f64, "{ok}/{total}");
}

#[test]
fn uncoupled_subsystems_share_pattern_statistics() {
    let s = henon_coupled(&HenonParams::<f64>::new(0.0, 100_000, 3)).unwrap();
    assert_ne!(s.driver, s.response);
    let emb = SeriesEmbedding::new(4, 1).unwrap();
    let px = series_distribution(&s.response, &emb).unwrap();
    let py = series_distribution(&s.driver, &emb).unwrap();
    let js = jensen_shannon(px.probs(), py.probs()).unwrap();
    assert!(js < 0.01, "{js}");
}

#[test]
fn full_coupling_synchronizes() {
    let s = henon_coupled(&HenonParams::<f64>::new(1.0, 2000, 8)).unwrap();
    let gap = s.driver.iter().zip(&s.response).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-9, "{gap}");
}

#[test]
fn white_noise_moments() {
    let x: Vec<f64> = white_noise(1_000_000, 99);
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    assert!(mean.abs() < 0.01, "{mean}");
    assert!((var - 1.0).abs() < 0.01, "{var}");
}

#[test]
fn logistic_forbids_patterns() {
    let emb = SeriesEmbedding::new(3, 1).unwrap();
    let p = series_distribution(&logistic(&MapParams::<f64>::new(20_000, 1)).unwrap(), &emb).unwrap();
    // the fully chaotic logistic map never produces a strictly decreasing triple
    assert_eq!(p.probs()[5], 0.0);
    assert!(p.probs().iter().filter(|&&x| x > 0.0).count() == 5);
}
