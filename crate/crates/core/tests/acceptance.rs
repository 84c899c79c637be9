use hilfer::harness::{acceptance, CRITERIA};

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let report = acceptance(id).unwrap();
        println!("{report}");
        if !report.passed() {
            failed.push(id);
        }
    }
    let passed = CRITERIA - failed.len();
    println!("acceptance: {passed}/{CRITERIA} criteria passed");
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
