use riskbench_core::{ingest_csv, read_csv, write_csv, CsvSchema, Error, PredictionSample};

fn schema() -> CsvSchema {
    CsvSchema::new("risk", "event")
        .with_group("centre")
        .with_id("patient")
}

#[test]
fn written_samples_read_back_bit_identical() {
    let p = vec![
        0.1,
        1.0 / 3.0,
        0.123456789012345,
        2e-17,
        0.999999999,
        0.0,
        1.0,
    ];
    let y = vec![false, true, false, true, true, false, true];
    let groups = ["a", "b", "a", "c", "b", "a", "c"]
        .map(String::from)
        .to_vec();
    let s = PredictionSample::new(p, y)
        .unwrap()
        .with_groups(groups)
        .unwrap();
    let mut buf = Vec::new();
    write_csv(
        &s,
        &mut buf,
        &CsvSchema::new("risk", "event").with_group("centre"),
    )
    .unwrap();
    let back = read_csv(
        buf.as_slice(),
        &CsvSchema::new("risk", "event").with_group("centre"),
    )
    .unwrap();
    assert_eq!(back.probabilities().len(), 7);
    for (a, b) in s.probabilities().iter().zip(back.probabilities()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(back.events(), s.events());
    assert_eq!(back.groups(), s.groups());
}

#[test]
fn columns_are_found_by_name_in_any_order() {
    let text = "centre,event,extra,patient,risk\nx,1,9,p1,0.7\ny,0,9,p2,0.2\n";
    let s = read_csv(text.as_bytes(), &schema()).unwrap();
    assert_eq!(s.probabilities(), &[0.7, 0.2]);
    assert_eq!(s.events(), &[true, false]);
    assert_eq!(s.ids().unwrap(), &["p1".to_string(), "p2".to_string()]);
}

#[test]
fn malformed_input_is_a_validation_error() {
    let s = CsvSchema::new("risk", "event");
    let cases = [
        ("risk,outcome\n0.2,1\n", "missing column"),
        ("risk,event\n0.2,2\n", "not 0 or 1"),
        ("risk,event\n1.2,1\n", "row 1"),
        ("risk,event\nabc,1\n", "not a number"),
        ("risk,event\nNaN,1\n", "row 1"),
        ("risk,event\n0.2,1\n,0\n", "row 2"),
        ("risk,event\n", "no data rows"),
        ("risk,event\n0.2,1,7\n", "CSV"),
    ];
    for (text, expect) in cases {
        let err = read_csv(text.as_bytes(), &s).unwrap_err();
        assert!(err.is_validation(), "{text:?}: {err}");
        assert!(err.to_string().contains(expect), "{text:?}: {err}");
    }
}

#[test]
fn missing_file_names_the_path() {
    let err = ingest_csv("/nonexistent/preds.csv", &CsvSchema::new("p", "y")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/preds.csv"));
}

#[test]
fn single_class_input_loads() {
    let s = read_csv("p,y\n0.2,0\n0.3,0\n".as_bytes(), &CsvSchema::new("p", "y")).unwrap();
    assert!(!s.has_both_classes());
}
