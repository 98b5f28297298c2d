use ordgamma::io::{
    load_image, load_results_csv, load_results_json, load_series, save_image, save_results, save_series,
    DistributionRecord, ImageMatrix, MatrixRecord, OutputFormat, ProfileRecord, RecordKind, ResultMeta,
    ResultRecord, SeriesFile,
};
use ordgamma::{
    divergence_matrix, divergence_profile, series_distribution, white_noise, GammaGenerator, ProfileOptions,
    SeriesEmbedding,
};
use proptest::prelude::*;
use tempfile::TempDir;

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-15)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn series_roundtrip(v in prop::collection::vec(-1e6f64..1e6, 1..100)) {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("s.csv");
        save_series(&v, &path).unwrap();
        prop_assert_eq!(load_series::<f64>(&SeriesFile::new(&path)).unwrap(), v);
    }

    #[test]
    fn image_roundtrip_both_encodings(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
        let dir = TempDir::new().unwrap();
        let px: Vec<u16> = white_noise::<f64>(w * h, seed).iter().map(|x| ((x.abs() * 80.0) as u16).min(255)).collect();
        let img = ImageMatrix::new(w, h, px).unwrap();
        for (name, binary) in [("a.pgm", true), ("b.pgm", false)] {
            let path = dir.path().join(name);
            save_image(&img, &path, binary).unwrap();
            prop_assert_eq!(&load_image(&path).unwrap(), &img);
        }
    }
}

#[test]
fn distribution_roundtrip_24_bins() {
    let dir = TempDir::new().unwrap();
    let s: Vec<f64> = white_noise(5000, 1);
    let d = series_distribution(&s, &SeriesEmbedding::new(4, 1).unwrap()).unwrap();
    let rec = ResultRecord::Distribution(DistributionRecord::new(&d, ResultMeta::series(4, 1).with_seed(1)));
    let json = dir.path().join("d.json");
    save_results(&rec, &json, OutputFormat::Json).unwrap();
    let back = load_results_json(&json).unwrap();
    assert_eq!(back, rec);
    let csv = dir.path().join("d.csv");
    save_results(&rec, &csv, OutputFormat::Csv).unwrap();
    match load_results_csv(&csv, RecordKind::Distribution).unwrap() {
        ResultRecord::Distribution(r) => assert!(close(&r.probs, d.probs())),
        other => panic!("{other:?}"),
    }
}

#[test]
fn matrix_csv_is_square_and_symmetric() {
    let dir = TempDir::new().unwrap();
    let emb = SeriesEmbedding::new(3, 1).unwrap();
    let dists: Vec<_> = (0..6)
        .map(|k| series_distribution(&white_noise::<f64>(300, k), &emb).unwrap())
        .collect();
    let m = divergence_matrix(&dists, &GammaGenerator::Log).unwrap();
    let rec = ResultRecord::Matrix(MatrixRecord::new(&m, (0..6).map(|i| i.to_string()).collect(), ResultMeta::default()));
    let path = dir.path().join("m.csv");
    save_results(&rec, &path, OutputFormat::Csv).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.split(',').count() == 6));
    match load_results_csv(&path, RecordKind::Matrix).unwrap() {
        ResultRecord::Matrix(r) => {
            let a = r.to_array().unwrap();
            assert_eq!(a, m);
            assert_eq!(a, a.t());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn profile_json_carries_metadata() {
    let dir = TempDir::new().unwrap();
    let s: Vec<f64> = white_noise(400, 2);
    let emb = SeriesEmbedding::new(4, 1).unwrap();
    let p = divergence_profile(&s, &emb, &GammaGenerator::Log, &ProfileOptions::default()).unwrap();
    let rec = ResultRecord::Profile(ProfileRecord::new(&p, ResultMeta::series(4, 1).with_g("log")));
    let path = dir.path().join("p.json");
    save_results(&rec, &path, OutputFormat::Json).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["g"], "log");
    assert_eq!(v["d"], 4);
    assert_eq!(v["tau"], 1);
    match load_results_json(&path).unwrap() {
        ResultRecord::Profile(r) => assert_eq!(r.to_profile::<f64>().unwrap(), p),
        other => panic!("{other:?}"),
    }
    let csv = dir.path().join("p.csv");
    save_results(&rec, &csv, OutputFormat::Csv).unwrap();
    match load_results_csv(&csv, RecordKind::Profile).unwrap() {
        ResultRecord::Profile(r) => {
            assert_eq!(r.positions, p.positions());
            assert!(close(&r.values, p.values()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn series_file_options() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, "t;v\n0;0.5\n1;0.7\n").unwrap();
    let source = SeriesFile::new(&path).column(1).delimiter(b';').skip_header(true);
    assert_eq!(load_series::<f64>(&source).unwrap(), vec![0.5, 0.7]);
    std::fs::write(&path, "").unwrap();
    assert!(load_series::<f64>(&SeriesFile::new(&path)).is_err());
}
