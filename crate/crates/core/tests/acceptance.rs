use cra_core::oracle::criteria;

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for c in criteria() {
        let r = c.run();
        println!("{}", r.line());
        if !r.pass {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
