use std::path::{Path, PathBuf};
use std::process::Command;

use rcalab::analysis::{is_injective, Verdict};
use rcalab::format::{parse_rule_file, write_rule_file};
use rcalab::mult::mul_digit;
use rcalab::tiles::TileSet;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn rcalab(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_rcalab")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const IDENTITY: &str = "ca v1\nalphabet 0 1\nmemory 0\nanticipation 0\n0 -> 0\n1 -> 1\n";
const AND: &str = "ca v1\nalphabet 0 1\nmemory 0\nanticipation 1\n1 1 -> 1\ndefault 0\n";
const SHIFT: &str = "ca v1\nalphabet 0 1\nmemory 1\nanticipation 1\n0 -> 0\n1 -> 1\n";
const ID_B: &str = "ca v1\nalphabet b\nmemory 0\nanticipation 0\nb -> b\n";
const ONE_TILE: &str = "tiles v1\ncolors c\ntile t c c c c\n";

/// Parse the CSV rows of `lyap` into `(n, lambda, lambda_over_n)`.
fn rows(csv: &str) -> Vec<(String, String, String)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,lambda,lambda_decimal,lambda_over_n,stderr"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 5, "{l}");
            (f[0].to_string(), f[1].to_string(), f[3].to_string())
        })
        .collect()
}

#[test]
fn check_identity() {
    let d = TempDir::new().unwrap();
    let r = rcalab(&["check", s(&write(&d, "id", IDENTITY))]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("injective: yes\nsurjective: yes"), "{}", r.stdout);
}

#[test]
fn check_and_rule() {
    let d = TempDir::new().unwrap();
    let path = write(&d, "and", AND);
    let r = rcalab(&["check", s(&path)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("injective: no (collision"), "{}", r.stdout);
    assert!(r.stdout.contains("surjective: no (orphan"), "{}", r.stdout);
    let r = rcalab(&["check", "--csv", s(&path)]);
    assert!(r.stdout.starts_with("property,verdict,certificate\ninjective,no,collision"));
}

#[test]
fn generated_mult_rule() {
    let d = TempDir::new().unwrap();
    let r = rcalab(&["mult", "gen", "3", "6"]);
    assert_eq!(r.code, 0);
    let rules: Vec<&str> = r.stdout.lines().filter(|l| l.contains("->")).collect();
    assert_eq!(rules.len(), 36);
    let ca = parse_rule_file(&r.stdout).unwrap();
    for a in 0..6u16 {
        for b in 0..6u16 {
            assert_eq!(ca.local(&[a, b]).unwrap() as u64, mul_digit(3, 6, a as u64, b as u64));
        }
    }
    assert_eq!(write_rule_file(&ca).unwrap(), r.stdout);
    let path = write(&d, "m36", &r.stdout);
    let r = rcalab(&["check", s(&path)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("injective: yes\nsurjective: yes"));
}

#[test]
fn mult_errors() {
    assert_eq!(rcalab(&["mult", "gen", "4", "6"]).code, 3);
    assert_eq!(rcalab(&["mult", "avg", "2", "4", "3"]).code, 3);
    assert_eq!(rcalab(&["mult", "witness", "2", "4", "3"]).code, 3);
    assert_eq!(rcalab(&["mult", "lemmas", "2", "4", "--k", "3", "--t", "1"]).code, 3);
}

#[test]
fn lyap_max_on_the_shift() {
    let d = TempDir::new().unwrap();
    let r = rcalab(&["lyap", s(&write(&d, "sigma", SHIFT)), "-n", "5", "--max", "--dir", "left"]);
    assert_eq!(r.code, 0);
    let got = rows(&r.stdout);
    assert_eq!(got.len(), 5);
    for (i, (n, v, over)) in got.iter().enumerate() {
        assert_eq!(n, &(i + 1).to_string());
        assert_eq!(v, &(i + 1).to_string());
        assert_eq!(over, "1.000000");
    }
    let r = rcalab(&["lyap", s(&d.path().join("sigma")), "-n", "4", "--max", "--dir", "right"]);
    assert!(rows(&r.stdout).iter().all(|(_, v, _)| v == "0"));
}

#[test]
fn lyap_point_and_sample() {
    let d = TempDir::new().unwrap();
    let path = write(&d, "sigma", SHIFT);
    let r = rcalab(&["lyap", s(&path), "-n", "3", "--point", "--config", "0|1|0"]);
    assert_eq!(rows(&r.stdout).iter().map(|t| t.1.clone()).collect::<Vec<_>>(), ["1", "2", "3"]);
    assert_eq!(rcalab(&["lyap", s(&path), "-n", "3", "--point"]).code, 3);
    assert_eq!(rcalab(&["lyap", s(&path), "-n", "3", "--point", "--config", "0|7|0"]).code, 3);
    let r = rcalab(&["lyap", s(&path), "-n", "2", "--avg", "--method", "sample", "--samples", "50"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.lines().nth(2).unwrap().starts_with("2,2.000000,"));
}

#[test]
fn lyap_closed_average() {
    let r = rcalab(&["lyap", "--avg", "--method", "closed", "-p", "2", "-q", "3", "-n", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(rows(&r.stdout)[1].1, "4/3");
    assert!(r.stdout.contains("2,4/3,1.333333,0.666667,"));

    let r = rcalab(&["lyap", "--avg", "--method", "closed", "-p", "2", "-q", "3", "-n", "40"]);
    let last = rows(&r.stdout).pop().unwrap();
    let normalized: f64 = last.2.parse().unwrap();
    let target = 2f64.ln() / 6f64.ln();
    assert!((normalized - target).abs() <= 3.0 / 40.0, "{normalized}");

    assert_eq!(rcalab(&["lyap", "--avg", "--method", "closed", "-n", "2"]).code, 3);
    assert_eq!(rcalab(&["lyap", "--max", "--method", "closed", "-p", "2", "-q", "3", "-n", "2"]).code, 3);
}

#[test]
fn lyap_brute_average_matches_closed_form() {
    let closed = rcalab(&["lyap", "--avg", "--method", "closed", "-p", "3", "-q", "2", "-n", "4"]);
    let brute = rcalab(&["lyap", "--avg", "--method", "brute", "-p", "3", "-q", "2", "-n", "4"]);
    assert_eq!(closed.stdout, brute.stdout);
    let parallel = rcalab(&["--jobs", "3", "lyap", "--avg", "--method", "brute", "-p", "3", "-q", "2", "-n", "4"]);
    assert_eq!(parallel.stdout, brute.stdout);
}

#[test]
fn lyap_cap_gives_undecided_rows() {
    let r = rcalab(&["lyap", "--max", "-p", "2", "-q", "3", "-n", "3", "--cap", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains(",undecided,"), "{}", r.stdout);
}

#[test]
fn mult_reports() {
    let r = rcalab(&["mult", "witness", "2", "3", "12"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("diverges at steps 0..12: yes"));
    let r = rcalab(&["mult", "witness", "3", "2", "2", "--trace"]);
    assert!(r.stdout.contains("i,x,y\n0,"));

    let r = rcalab(&["mult", "lemmas", "3", "2", "--k", "3", "--t", "2"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("counterexamples: 0"));

    let r = rcalab(&["mult", "avg", "2", "3", "2"]);
    assert!(r.stdout.contains("I_n: 4/3 (1.333333)"));
    assert!(r.stdout.contains("i,P_n,p_n,d_n\n0,0,216,1\n1,144,216,6\n2,72,72,12\n"));
    let brute = rcalab(&["mult", "avg", "2", "3", "3", "--method", "brute"]);
    assert_eq!(brute.stdout, rcalab(&["mult", "avg", "2", "3", "3"]).stdout);
}

#[test]
fn tiles_commands() {
    let d = TempDir::new().unwrap();
    let one = write(&d, "one", ONE_TILE);
    let r = rcalab(&["tiles", "complete", s(&one)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, ONE_TILE);
    let r = rcalab(&["tiles", "toca", s(&one)]);
    assert_eq!(r.stdout, "ca v1\nalphabet t\nmemory 0\nanticipation 1\nt t -> t\n");

    let r = rcalab(&["tiles", "random", "--colors", "3", "--tiles", "5", "--seed", "9"]);
    let random = write(&d, "random", &r.stdout);
    assert_eq!(TileSet::parse(&r.stdout).unwrap().len(), 5);
    let r = rcalab(&["tiles", "check", s(&random)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("2-way deterministic: yes\ncomplete: no"));
    let r = rcalab(&["tiles", "toca", "--complete", s(&random)]);
    let ca = parse_rule_file(&r.stdout).unwrap();
    assert_eq!(ca.alphabet_ref().len(), 9);
    assert_eq!(is_injective(&ca, None).unwrap().verdict, Verdict::Yes);
    assert_eq!(rcalab(&["tiles", "toca", s(&random)]).code, 3);

    let bad = write(&d, "bad", "tiles v1\ntile p a b a a\ntile q a b b b\n");
    let r = rcalab(&["tiles", "check", s(&bad)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("NE-deterministic: no (p and q share north and east)"));
    let r = rcalab(&["tiles", "complete", s(&bad)]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("not 2-way deterministic"));
}

#[test]
fn reduce_speed() {
    let d = TempDir::new().unwrap();
    let inner = write(&d, "idb", ID_B);
    for target in ["sofic", "fullshift"] {
        let r = rcalab(&["reduce", "speed", s(&inner), "--b", "b", "--target", target, "-n", "60"]);
        assert_eq!(r.code, 0);
        assert!(r.stdout.starts_with("t,position\n0,0\n1,2\n2,4\n"));
        assert!(r.stdout.contains("60,120\n"));
        assert!(r.stdout.contains("slope: 2.000000\nclass: fast"));

        let r = rcalab(&["reduce", "speed", s(&inner), "--b", "none", "--target", target, "-n", "60"]);
        let slope: f64 = r
            .stdout
            .lines()
            .find_map(|l| l.strip_prefix("slope: "))
            .unwrap()
            .parse()
            .unwrap();
        assert!(slope <= 5.0 / 3.0 + 0.1);
        assert!(r.stdout.contains("class: slow"));
    }
    assert_eq!(rcalab(&["reduce", "speed", s(&inner), "--b", "b", "-n", "5"]).code, 3);
}

#[test]
fn reduce_build_and_errors() {
    let d = TempDir::new().unwrap();
    let inner = write(&d, "idb", ID_B);
    let r = rcalab(&["reduce", "build", s(&inner), "--b", "all", "--target", "fullshift"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("target: fullshift"));
    assert!(r.stdout.contains("belt step bijective: yes"));
    assert!(r.stdout.contains("reversible: yes"));

    let left = write(&d, "left", "ca v1\nalphabet 0 1\nmemory -1\nanticipation -1\n0 -> 0\n1 -> 1\n");
    let r = rcalab(&["reduce", "build", s(&left), "--b", "all"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("inner CA must be radius-1/2"), "{}", r.stderr);

    let and = write(&d, "and", AND);
    let r = rcalab(&["reduce", "build", s(&and), "--b", "0"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("reversible"));
    assert_eq!(rcalab(&["reduce", "build", s(&inner), "--b", "x"]).code, 3);
}

#[test]
fn reduce_immortality_writes_a_rule_file() {
    let d = TempDir::new().unwrap();
    let r = rcalab(&["reduce", "immortality", s(&write(&d, "one", ONE_TILE))]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("# B: (t.blank,0)\n"));
    let ca = parse_rule_file(&r.stdout).unwrap();
    assert_eq!(ca.alphabet_ref().len(), 12);
    assert_eq!(is_injective(&ca, None).unwrap().verdict, Verdict::Yes);
}

#[test]
fn diagram() {
    let d = TempDir::new().unwrap();
    let r = rcalab(&["diagram", s(&write(&d, "sigma", SHIFT)), "--config", "0|1|0", "-t", "2", "--lo", "-2", "--hi", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "   0 00100\n   1 01000\n   2 10000\n");
}

#[test]
fn input_errors() {
    let d = TempDir::new().unwrap();
    let gap = write(&d, "gap", "ca v1\nalphabet 0 1\nmemory 0\nanticipation 0\n0 -> 0\n");
    let r = rcalab(&["check", s(&gap)]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("line"), "{}", r.stderr);
    assert_eq!(rcalab(&["check", "/nonexistent/rule"]).code, 3);
    assert_eq!(rcalab(&["lyap", "--max"]).code, 3);
    assert_eq!(rcalab(&["bogus"]).code, 3);
    assert_eq!(rcalab(&["--help"]).code, 0);
}

#[test]
fn output_is_deterministic() {
    let a = rcalab(&["tiles", "random", "--colors", "4", "--tiles", "7", "--seed", "3"]);
    let b = rcalab(&["tiles", "random", "--colors", "4", "--tiles", "7", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = rcalab(&["lyap", "--max", "-p", "3", "-q", "2", "-n", "3"]);
    let b = rcalab(&["--jobs", "2", "lyap", "--max", "-p", "3", "-q", "2", "-n", "3"]);
    assert_eq!(a.stdout, b.stdout);
}
