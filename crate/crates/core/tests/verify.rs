use amalgam::verify::{run_suite, Bounds, Status, VerifyError, SUITES};

#[test]
fn quick_suites_pass_and_replay_byte_identically() {
    let bounds = Bounds::quick();
    for suite in SUITES {
        let first = run_suite(suite, &bounds).unwrap();
        let second = run_suite(suite, &bounds).unwrap();
        assert!(first.passed(), "{first}");
        assert_eq!(first.to_lines(), second.to_lines(), "{suite}");
        assert!(first.count(Status::Pass) > 0, "{suite}");
    }
}

#[test]
fn shared_preferences_are_skipped_not_failed() {
    let report = run_suite("consumer-product", &Bounds::quick()).unwrap();
    let one_product = report.record("cp.kernel.P1.C2").unwrap();
    assert_eq!(one_product.status, Status::Skip);
    assert_eq!(report.record("cp.kernel.P2.C2").unwrap().status, Status::Pass);
}

#[test]
fn suite_names_and_bounds_are_checked() {
    assert!(matches!(run_suite("nope", &Bounds::quick()), Err(VerifyError::UnknownSuite(_))));
    let bad = Bounds {
        machine_size: 9,
        ..Bounds::quick()
    };
    assert!(matches!(run_suite("rotating-machines", &bad), Err(VerifyError::BadBounds(_))));
}
