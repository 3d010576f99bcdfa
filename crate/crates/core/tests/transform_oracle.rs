//! Transform checked against the flattening oracle.

mod common;

use proptest::prelude::*;

use common::oracle::{check, mappings, source, to_data_mappings};
use screenforge_core::transform::{transform, Record};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn transform_agrees_with_flattening_oracle(src in source(), ms in mappings()) {
        check(&src, &ms)?;
    }

    #[test]
    fn transform_is_deterministic(src in source(), ms in mappings()) {
        let record: Record = src.as_object().unwrap().clone();
        let dm = to_data_mappings(&ms);
        prop_assert_eq!(transform(&dm, &record), transform(&dm, &record));
    }
}
