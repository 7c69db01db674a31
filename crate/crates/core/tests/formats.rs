mod common;

use std::path::PathBuf;

use common::to_log;
use proptest::prelude::*;
use starstar_core::ingest::{parse, parse_jsonl, parse_xoc, write_jsonl, write_xoc, Format};
use starstar_core::projection::{case_notion, project, write_csv, write_xes, ProjectionParams};
use starstar_core::{ModelSnapshot, ObjectClass};
use starstar_oracle::{random_log, RandomLogShape};

fn fixture(name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn fixtures_parse_to_l1() {
    let l1 = to_log(&starstar_oracle::l1());
    let xoc = parse_xoc(&fixture("l1.xoc")).unwrap();
    let jsonl = parse_jsonl(&fixture("l1.jsonl")).unwrap();
    assert_eq!(xoc, l1);
    assert_eq!(jsonl, l1);
    let (_, report) = parse(&fixture("l1.xoc"), Format::Xoc).unwrap();
    assert!(report.errors.is_empty() && report.warnings.is_empty());
    assert_eq!(write_jsonl(&l1).as_bytes(), fixture("l1.jsonl"));
}

#[test]
fn l1_projection_matches_golden_files() {
    let log = parse_xoc(&fixture("l1.xoc")).unwrap();
    let params = ProjectionParams::new(ObjectClass::new("order").unwrap(), 0.2, 0).unwrap();
    let clog = project(&log, case_notion(&log, &params).unwrap()).unwrap();
    let xes = write_xes(&clog);
    assert_eq!(xes.as_bytes(), fixture("l1_order.xes"));
    assert_eq!(write_xes(&clog), xes);
    assert_eq!(write_csv(&clog).as_bytes(), fixture("l1_order.csv"));
}

#[test]
fn snapshot_ids_do_not_depend_on_the_format() {
    let a = ModelSnapshot::build(parse_xoc(&fixture("l1.xoc")).unwrap());
    let b = ModelSnapshot::build(parse_jsonl(&fixture("l1.jsonl")).unwrap());
    assert_eq!(a.id(), b.id());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn round_trips(seed in any::<u64>()) {
        let log = to_log(&random_log(seed, RandomLogShape::default()));
        let via_xoc = parse_xoc(write_xoc(&log).as_bytes()).unwrap();
        let via_jsonl = parse_jsonl(write_jsonl(&log).as_bytes()).unwrap();
        prop_assert_eq!(&via_xoc, &log);
        prop_assert_eq!(&via_jsonl, &log);
        prop_assert_eq!(write_xoc(&via_jsonl), write_xoc(&log));
    }
}
