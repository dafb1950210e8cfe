//! Randomized ingest/write round-trip invariants.

use mmm_core::data::{load_csv, write_csv, Dataset, LoadOptions, RawColumn, Schema};
use proptest::prelude::*;

fn small_dataset() -> impl Strategy<Value = (Dataset, Vec<f64>)> {
    (1usize..30)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0u32..3, n),
                proptest::collection::vec(-1e4f64..1e4, n),
            )
        })
        .prop_map(|(codes, raw_numeric)| {
            let schema = Schema::parse("g,cat,lo,mid,hi\nx,num\n").unwrap();
            let data = Dataset::from_parts(
                schema,
                vec![
                    RawColumn::Categorical(codes),
                    RawColumn::Numeric(raw_numeric.clone()),
                ],
                true,
            )
            .unwrap();
            (data, raw_numeric)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_preserves_content((data, raw) in small_dataset()) {
        let dir = tempfile::tempdir().unwrap();

        // Standardized write → read without re-standardizing.
        let std_path = dir.path().join("std.csv");
        write_csv(&data, &std_path, false).unwrap();
        let back = load_csv(
            &std_path,
            data.schema(),
            &LoadOptions { standardize: false, impute: false },
        )
        .unwrap();
        for row in 0..data.n_rows() {
            prop_assert_eq!(data.cat_code(row, 0), back.cat_code(row, 0));
            prop_assert!((data.num_value(row, 1) - back.num_value(row, 1)).abs() < 1e-9);
        }

        // Destandardized write recovers the raw scale.
        let raw_path = dir.path().join("raw.csv");
        write_csv(&data, &raw_path, true).unwrap();
        let recovered = load_csv(
            &raw_path,
            data.schema(),
            &LoadOptions { standardize: false, impute: false },
        )
        .unwrap();
        for (row, want) in raw.iter().enumerate() {
            let got = recovered.num_value(row, 1);
            prop_assert!(
                (got - want).abs() <= 1e-6 * want.abs().max(1.0),
                "row {}: {} vs {}", row, got, want
            );
        }
    }
}
