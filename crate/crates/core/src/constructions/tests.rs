use super::*;
use crate::presentation::verify;

fn quiet(_: &Presentation) {}

fn schedule(entries: &[(u64, u64)], horizon: u64) -> EnumerationSchedule {
    EnumerationSchedule::new(entries.iter().copied(), horizon).unwrap()
}

fn status(p: &Presentation, label: &str) -> LabelStatus {
    p.entry(label)
        .unwrap_or_else(|| panic!("{label} missing"))
        .status
        .clone()
}

fn rationalized(p: &Presentation, label: &str) -> bool {
    matches!(status(p, label), LabelStatus::Rationalized(_))
}

#[test]
fn singleton_empty_schedule() {
    let (p, truth) = build_singleton(&schedule(&[], 5), 5, Policy::Toy, &mut quiet).unwrap();
    for i in 0..5 {
        assert_eq!(status(&p, &format!("x{i}")), LabelStatus::Transcendental);
    }
    assert_eq!(truth.basis, vec!["x0", "x1", "x2", "x3", "x4"]);
    assert!(truth.algebraic.is_empty());
}

#[test]
fn singleton_serves_at_entry() {
    let c = schedule(&[(1, 3)], 10);
    let mut at = None;
    let mut observe = |p: &Presentation| {
        if at.is_none() && p.entry("x1").is_some() && rationalized(p, "x1") {
            at = Some(p.stage());
        }
        assert!(verify(p, None).ok());
    };
    let (_, truth) = build_singleton(&c, 10, Policy::Toy, &mut observe).unwrap();
    assert_eq!(at, Some(4));
    assert_eq!(truth.algebraic, vec!["x1", "y1"]);
    assert!(!truth.basis.contains(&"x1".to_string()));
}

#[test]
fn singleton_one_per_stage() {
    let c = schedule(&[(0, 1), (1, 1)], 6);
    let mut seen = Vec::new();
    let mut observe = |p: &Presentation| {
        for l in ["x0", "x1"] {
            if p.entry(l).is_some() && rationalized(p, l) && !seen.iter().any(|(m, _)| *m == l) {
                seen.push((l, p.stage()));
            }
        }
    };
    build_singleton(&c, 6, Policy::Toy, &mut observe).unwrap();
    assert_eq!(seen, vec![("x0", 2), ("x1", 3)]);
}

#[test]
fn upcone_layout() {
    let (p, truth) = build_upcone(&schedule(&[(0, 2)], 8), 8, Policy::Toy, &mut quiet).unwrap();
    assert!(rationalized(&p, "x0"));
    for k in 1..8 {
        assert_eq!(status(&p, &format!("x{k}")), LabelStatus::Transcendental);
    }
    assert_eq!(truth.algebraic, vec!["x0", "y0"]);
    let (p, _) = build_upcone(&schedule(&[], 8), 8, Policy::Toy, &mut quiet).unwrap();
    assert!(p
        .ledger()
        .iter()
        .all(|e| !matches!(e.status, LabelStatus::Rationalized(_))));
}

#[test]
fn upcone_copy_swallows() {
    let c = schedule(&[], 8);
    let d = schedule(&[(0, 3)], 8);
    let (p, truth) = build_upcone_copy(&c, Some(&d), 8, Policy::Toy, &mut quiet).unwrap();
    assert!(rationalized(&p, "x1"));
    assert_eq!(status(&p, "x1'"), LabelStatus::Transcendental);
    assert_eq!(truth.replaced.get("x1").map(String::as_str), Some("x1'"));
    // One surviving transcendental x per curve.
    for k in 0..8 {
        let alive = [format!("x{k}"), format!("x{k}'")]
            .iter()
            .filter(|l| {
                p.entry(l)
                    .is_some_and(|e| e.status == LabelStatus::Transcendental)
            })
            .count();
        assert_eq!(alive, 1, "curve {k}");
    }
    let (plain, _) = build_upcone(&c, 8, Policy::Toy, &mut quiet).unwrap();
    let (copy, _) =
        build_upcone_copy(&c, Some(&schedule(&[], 8)), 8, Policy::Toy, &mut quiet).unwrap();
    assert_eq!(plain.dump(true), copy.dump(true));
}

#[test]
fn edegree_generations() {
    let mut chips = vec![5; 11];
    chips[2] = 0;
    chips[5] = 0;
    let chip = ChipSpec::new(chips, vec![5]).unwrap();
    let (p, truth) = build_edegree(&chip, 11, Policy::Toy, &mut quiet).unwrap();
    assert!(rationalized(&p, "x0,0"));
    assert!(rationalized(&p, "x0,3"));
    assert_eq!(status(&p, "x0,6"), LabelStatus::Transcendental);
    assert!(truth.basis.contains(&"x0,6".to_string()));
    assert_eq!(status(&p, "x2,0"), LabelStatus::Transcendental);
    assert!(verify(&p, None).ok());
}

#[test]
fn edegree_copy_stable_row() {
    let phi = PhiTable::new([(0, 4, 2)]).unwrap();
    let d = schedule(&[(5, 6)], 12);
    let (p, truth) = build_edegree_copy(&phi, &d, 12, Policy::Toy, &mut quiet).unwrap();
    // Retired at stages 1..=4, then the generation of stage 4 settles.
    assert_eq!(status(&p, "x0,4"), LabelStatus::Transcendental);
    assert!(truth.basis.contains(&"x0,4".to_string()));
    assert!(p.entry("x0,5").is_none());
    // No row for i = 1: every generation of curve 2 is eventually algebraic.
    assert!(p
        .ledger()
        .iter()
        .filter(|e| e.label.starts_with("x2,"))
        .all(|e| matches!(e.status, LabelStatus::Rationalized(_))));
}

#[test]
fn edegree_copy_invalidated_row_and_swallow() {
    let phi = PhiTable::new([(0, 4, 3)]).unwrap();
    let d = schedule(&[(1, 2)], 10);
    let (p, truth) = build_edegree_copy(&phi, &d, 10, Policy::Toy, &mut quiet).unwrap();
    assert!(rationalized(&p, "x3"));
    assert_eq!(status(&p, "x3'"), LabelStatus::Transcendental);
    assert!(truth.basis.contains(&"x3'".to_string()));
    // D gained 1 < 3 at stage 2 only, before the row; the row holds.
    assert!(truth.basis.contains(&"x0,4".to_string()));

    let d = schedule(&[(1, 6)], 10);
    let (p, _) = build_edegree_copy(&phi, &d, 10, Policy::Toy, &mut quiet).unwrap();
    assert!(p
        .ledger()
        .iter()
        .filter(|e| e.label.starts_with("x0,"))
        .all(|e| matches!(e.status, LabelStatus::Rationalized(_))));
}

#[test]
fn fork_shares_prefix() {
    let fork = build_fork(0, 6, 20, Policy::Toy).unwrap();
    let f = fork.f.facts_text();
    let e = fork.e.facts_text();
    let prefix: String = f
        .lines()
        .take(fork.prefix_facts)
        .map(|l| format!("{l}\n"))
        .collect();
    assert!(e.starts_with(&prefix));
    assert_eq!(status(&fork.f, "x1"), LabelStatus::Transcendental);
    assert!(rationalized(&fork.e, "x1"));
    assert_eq!(status(&fork.e, "t2"), LabelStatus::Transcendental);
    assert!(verify(&fork.f, None).ok() && verify(&fork.e, None).ok());
    assert!(build_fork(0, 5, 5, Policy::Toy).is_err());
}

#[test]
fn sidecar_round_trip() {
    let c = schedule(&[], 6);
    let d = schedule(&[(0, 3)], 6);
    let (_, truth) = build_upcone_copy(&c, Some(&d), 6, Policy::Toy, &mut quiet).unwrap();
    assert_eq!(GroundTruth::parse(&truth.to_text()).unwrap(), truth);
}
