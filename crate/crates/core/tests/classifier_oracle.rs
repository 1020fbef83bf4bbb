use g2strata::classifier::{instance_for_label, verify_classification, StratumLabel};
use g2strata::field_curve::registry;

#[test]
fn split_labels_agree_with_oracle() {
    for name in ["b37", "b61"] {
        let e = registry::resolve(name).unwrap().curve;
        for label in StratumLabel::SPLIT {
            let inst = instance_for_label(&e, label, 11, 50).unwrap();
            let rep = verify_classification(&e, &inst.p, &inst.tau, &inst.sections).unwrap();
            assert!(rep.passed(), "{name} {label}: {:?}", rep.diffs);
            assert!(rep.classification.labels().contains(&label), "{name} {label}: got {:?}", rep.classification.labels());
        }
    }
}
