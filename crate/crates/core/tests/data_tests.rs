// SPDX-License-Identifier: Apache-2.0

mod oracles;

use jplay_core::data::*;
use jplay_core::{nn_classify, overall_accuracy, DataMatrix, Dataset};
use oracles::{rand_mat, rng};

fn random_dataset(seed: u64, d: usize, n: usize, labeled: bool) -> Dataset {
    let mut r = rng(seed);
    // spread values over many magnitudes so formatting is exercised
    let x = rand_mat(&mut r, d, n, 1.0).map(|v| v * 10f64.powi((v * 1e6) as i32 % 12 - 6));
    let labels = labeled.then(|| (0..n).map(|i| i % 3 + 1).collect());
    Dataset::new(DataMatrix::new(x).unwrap(), labels).unwrap()
}

#[test]
fn csv_round_trip_is_exact_to_rounding() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, orientation) in [(1, Orientation::SamplesAsRows), (2, Orientation::SamplesAsColumns)] {
        let labeled = orientation == Orientation::SamplesAsRows;
        let ds = random_dataset(seed, 5, 9, labeled);
        let path = dir.path().join(format!("d{seed}.csv"));
        save_csv(&ds, &path, orientation).unwrap();
        let opts = CsvOptions {
            orientation,
            label_column: labeled.then_some(LabelColumn::Last),
        };
        let back = load_csv(&path, &opts).unwrap();
        assert_eq!(back.labels, ds.labels);
        assert_eq!(back.n_classes, ds.n_classes);
        for (a, b) in back.x.matrix().iter().zip(ds.x.matrix().iter()) {
            assert!((a - b).abs() <= 1e-15 * b.abs(), "{a} vs {b}");
        }
    }
}

#[test]
fn csv_rows_are_samples_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    std::fs::write(&path, "1,2\n3,4\n").unwrap();
    let ds = load_csv(&path, &CsvOptions::default()).unwrap();
    assert_eq!(ds.x.matrix(), &jplay_core::nalgebra::dmatrix![1.0, 3.0; 2.0, 4.0]);
    std::fs::write(&path, "f1,f2,cls\n0.5,1,1\n2,3,2\n").unwrap();
    let ds = load_csv(
        &path,
        &CsvOptions {
            label_column: Some(LabelColumn::Name("cls".into())),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(ds.n_classes, 2);
    assert_eq!(ds.x.dim(), 2);
}

#[test]
fn binary_double_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for labeled in [true, false] {
        let ds = random_dataset(7, 7, 13, labeled);
        let a = dir.path().join("a.jpld");
        let b = dir.path().join("b.jpld");
        save_binary(&ds, &a).unwrap();
        let back = load_binary(&a).unwrap();
        save_binary(&back, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(std::fs::read(&a).unwrap().len(), 4 + 1 + 16 + 8 * 7 * 13 + 4 * 13);
        let bits = |d: &Dataset| d.x.matrix().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&ds));
        assert_eq!(back.labels, ds.labels);
    }
}

#[test]
fn binary_errors_name_the_offset() {
    let ds = random_dataset(3, 2, 3, true);
    let bytes = encode_binary(&ds).unwrap();
    match decode_binary(&bytes[..bytes.len() - 1]) {
        Err(jplay_core::Error::Format { offset, .. }) => assert!(offset >= 21),
        other => panic!("expected a format error, got {other:?}"),
    }
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(decode_binary(&bad), Err(jplay_core::Error::Format { offset: 0, .. })));
}

#[test]
fn blobs_are_deterministic_and_noise_free_when_sigma_is_zero() {
    let a = synth_blobs(3, 4, 5, 2.0, 0.3, 11);
    let b = synth_blobs(3, 4, 5, 2.0, 0.3, 11);
    let bits = |d: &Dataset| d.x.matrix().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
    let c = synth_blobs(3, 4, 5, 2.0, 0.0, 11);
    for class in 0..3 {
        let first = c.x.matrix().column(class * 4).into_owned();
        for k in 1..4 {
            assert_eq!(c.x.matrix().column(class * 4 + k), first);
        }
    }
}

#[test]
fn widely_separated_blobs_are_classified_perfectly() {
    let ds = synth_blobs(4, 40, 6, 100.0, 1.0, 5);
    let split = random_split_per_class(ds.labels().unwrap(), 20, 9).unwrap();
    let (tr, te) = (ds.subset(&split.train), ds.subset(&split.test));
    assert_eq!(tr.x.n_samples(), te.x.n_samples());
    let pred = nn_classify(tr.x.matrix(), tr.labels().unwrap(), te.x.matrix()).unwrap();
    assert_eq!(overall_accuracy(&pred, te.labels().unwrap()).unwrap(), 1.0);
}

#[test]
fn unit_columns_caps_the_largest_norm_at_one() {
    let ds = random_dataset(4, 6, 20, false);
    let out = normalize(&ds.x, NormalizeMode::UnitColumns);
    let max = out.data.matrix().column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!((max - 1.0).abs() <= 1e-12);
}

#[test]
fn normalization_parameters_transfer_to_new_data() {
    let train = random_dataset(5, 4, 10, false);
    let test = random_dataset(6, 4, 5, false);
    for mode in [NormalizeMode::ZscoreFeatures, NormalizeMode::MinmaxFeatures, NormalizeMode::UnitColumns] {
        let fitted = normalize(&train.x, mode);
        let again = fitted.params.apply(&train.x).unwrap();
        assert_eq!(again, fitted.data);
        assert_eq!(fitted.params.apply(&test.x).unwrap().n_samples(), 5);
    }
}

#[test]
fn split_files_round_trip() {
    let labels: Vec<usize> = (0..30).map(|i| i % 3 + 1).collect();
    let split = random_split_per_class(&labels, 4, 2).unwrap();
    assert_eq!(split.train.len(), 12);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    save_split(&split, &path).unwrap();
    assert_eq!(load_split(&path).unwrap(), split);
}
