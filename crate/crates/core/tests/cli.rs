//! End-to-end runs of the `trdeg` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn trdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trdeg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes `C = {1@3}` and builds a singleton presentation into `dir`.
fn singleton(dir: &Path, stages: u64, name: &str) -> (PathBuf, PathBuf) {
    let set = dir.join("c.txt");
    fs::write(&set, "enter 1 at 3\nhorizon 12\n").unwrap();
    let out = dir.join(format!("{name}.dump"));
    let truth = dir.join(format!("{name}.truth"));
    let st = stages.to_string();
    let o = trdeg(&[
        "build",
        "singleton",
        "--set",
        s(&set),
        "--stages",
        &st,
        "--out",
        s(&out),
        "--truth",
        s(&truth),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    (out, truth)
}

#[test]
fn primes_and_curves() {
    let o = trdeg(&["primes", "--count", "2", "--paper"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "5 2309");
    let o = trdeg(&["primes", "--count", "3", "--paper"]);
    assert_eq!(code(&o), 1, "q2 needs the slow flag");
    let o = trdeg(&["curve", "--index", "0"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("genus 6"), "{text}");
}

#[test]
fn build_verify_and_determinism() {
    let dir = TempDir::new().unwrap();
    let (a, ta) = singleton(dir.path(), 8, "a");
    let (b, tb) = singleton(dir.path(), 8, "b");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(&ta).unwrap(), fs::read(&tb).unwrap());
    let truth = fs::read_to_string(&ta).unwrap();
    assert!(
        truth.contains("basis x0\n") && truth.contains("algebraic x1\n"),
        "{truth}"
    );
    assert_eq!(code(&trdeg(&["verify", s(&a)])), 0);

    // An earlier stage is a prefix of a later one, not the other way round.
    let (early, _) = singleton(dir.path(), 4, "early");
    assert_eq!(code(&trdeg(&["verify", s(&a), "--against", s(&early)])), 0);
    assert_eq!(code(&trdeg(&["verify", s(&early), "--against", s(&a)])), 2);
}

#[test]
fn broken_inputs() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "enter one at 3\n").unwrap();
    let out = dir.path().join("x.dump");
    let o = trdeg(&[
        "build",
        "singleton",
        "--set",
        s(&bad),
        "--stages",
        "4",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&trdeg(&["build", "singleton"])), 1);
    assert_eq!(code(&trdeg(&["no-such-command"])), 1);

    let (dump, _) = singleton(dir.path(), 6, "c");
    let text = fs::read_to_string(&dump).unwrap();
    // Swap the operands' result of the first multiplication fact.
    let line = text.lines().find(|l| l.starts_with("mul ")).unwrap();
    let parts: Vec<&str> = line.split(' ').collect();
    let wrong = format!("mul {} {} {}", parts[1], parts[2], 0);
    let corrupt = dir.path().join("corrupt.dump");
    fs::write(&corrupt, text.replacen(line, &wrong, 1)).unwrap();
    assert_eq!(code(&trdeg(&["verify", s(&corrupt)])), 2);
}

#[test]
fn reductions() {
    let dir = TempDir::new().unwrap();
    let (dump, _) = singleton(dir.path(), 8, "r");
    let set = dir.path().join("c.txt");
    let p = s(&dump);

    let o = trdeg(&["reduce", "c-from-t", "--presentation", p, "--index", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("in C"), "{}", stdout(&o));

    let o = trdeg(&[
        "reduce",
        "basis-from-c",
        "--presentation",
        p,
        "--set",
        s(&set),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("x0"));

    let member = |element: &str, degree: &str| {
        trdeg(&[
            "reduce",
            "membership",
            "--presentation",
            p,
            "--basis",
            "x0",
            "--element",
            element,
            "--degree",
            degree,
        ])
    };
    let o = member("y0", "8");
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("X^5 + Y0^5 - 1"), "{}", stdout(&o));
    assert_eq!(
        code(&member("y0", "4")),
        3,
        "too small a degree bound is inconclusive"
    );

    let o = trdeg(&[
        "reduce",
        "annihilator",
        "--presentation",
        p,
        "--tuple",
        "x0,y0",
        "--degree",
        "5",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("X^5 + Y^5 - 1"), "{}", stdout(&o));
}

#[test]
fn fork_shares_prefix() {
    let dir = TempDir::new().unwrap();
    let (f, e) = (dir.path().join("f.dump"), dir.path().join("e.dump"));
    let o = trdeg(&[
        "fork",
        "--curve",
        "0",
        "--prefix-stages",
        "3",
        "--stages",
        "8",
        "--out-f",
        s(&f),
        "--out-e",
        s(&e),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let facts = |p: &Path| -> Vec<String> {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| l.starts_with("add ") || l.starts_with("mul "))
            .map(String::from)
            .collect()
    };
    let (ff, fe) = (facts(&f), facts(&e));
    let shared = ff.iter().zip(&fe).take_while(|(a, b)| a == b).count();
    assert!(shared >= 8, "only {shared} shared facts");
    assert_eq!(code(&trdeg(&["verify", s(&f)])), 0);
    assert_eq!(code(&trdeg(&["verify", s(&e)])), 0);
}
