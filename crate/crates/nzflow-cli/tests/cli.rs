//! End-to-end tests of the CLI grammar, output formats, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nzflow"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("nzflow-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn family_output_parses_back() {
    let out = run(&["family", "petersen"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("10 15\n"));
    let path = write_temp("pet.txt", &text);
    let conn = run(&["connectivity", path.to_str().unwrap()]);
    assert!(conn.status.success());
    assert!(stdout(&conn).contains("edge_connectivity: 3"));
}

#[test]
fn census_count_of_doubled_cycle_identity() {
    // Fully doubled cycle: 5 * 4^n flows with nonzero through-current plus
    // 5^n opposing-pair flows.
    let g = run(&["family", "doubled_cycle(4)"]);
    let path = write_temp("dc4.txt", &stdout(&g));
    let out = run(&["census", "count", path.to_str().unwrap(), "--group", "z2xz3"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim(),
        format!("count: {}", 5u64 * 4u64.pow(4) + 5u64.pow(4))
    );
    // Same count with worker threads.
    let par =
        run(&["--threads", "4", "census", "count", path.to_str().unwrap(), "--group", "z2xz3"]);
    assert_eq!(stdout(&par), stdout(&out));
}

#[test]
fn census_enum_respects_limit_and_format() {
    let path = write_temp("tri.txt", "3 3\n0 1\n1 2\n2 0\n");
    let out = run(&["census", "enum", path.to_str().unwrap(), "--group", "z3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for l in &lines {
        assert_eq!(l.split(',').count(), 3);
        assert!(!l.contains('|')); // cyclic group: single component
    }
    let z6 = run(&["census", "enum", path.to_str().unwrap(), "--group", "z2xz3", "--limit", "3"]);
    let lines6: Vec<String> = stdout(&z6).lines().map(str::to_owned).collect();
    assert_eq!(lines6.len(), 3);
    assert!(lines6[0].contains('|'));
}

#[test]
fn gen_writes_distinct_flows_to_file() {
    // The K4 pipeline yields 9 distinct flows; a limit of 5 truncates.
    let g = run(&["family", "complete(4)"]);
    let path = write_temp("k4gen.txt", &stdout(&g));
    let mut out_path = std::env::temp_dir();
    out_path.push(format!("nzflow-cli-test-{}-flows.txt", std::process::id()));
    let out = run(&[
        "gen",
        "z6",
        path.to_str().unwrap(),
        "--limit",
        "5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let flows = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = flows.lines().collect();
    assert_eq!(lines.len(), 5);
    let distinct: std::collections::BTreeSet<&str> = lines.iter().copied().collect();
    assert_eq!(distinct.len(), lines.len());
}

#[test]
fn verify_passes_on_good_inputs() {
    for (family, variant) in
        [("tripled_triangle", "z3"), ("doubled_cycle(4)", "z4"), ("complete(5)", "z6")]
    {
        let g = run(&["family", family]);
        let path = write_temp(&format!("v-{variant}.txt"), &stdout(&g));
        let out = run(&["verify", variant, path.to_str().unwrap()]);
        let text = stdout(&out);
        assert!(out.status.success(), "verify {variant} failed:\n{text}");
        assert!(text.contains("result: PASS"));
        assert!(text.contains("guaranteed_bound:"));
        assert!(text.contains("input_digest:"));
    }
}

#[test]
fn verify_is_reproducible() {
    let g = run(&["family", "complete(4)"]);
    let path = write_temp("k4.txt", &stdout(&g));
    let strip_time = |s: String| -> String {
        s.lines().filter(|l| !l.starts_with("wall_time_ms")).collect::<Vec<_>>().join("\n")
    };
    let a = strip_time(stdout(&run(&["verify", "z6", path.to_str().unwrap()])));
    let b = strip_time(stdout(&run(&["verify", "z6", path.to_str().unwrap()])));
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    // Usage error: unknown subcommand.
    let usage = bin().arg("frobnicate").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    // Parse error: malformed graph.
    let bad = write_temp("bad.txt", "2 1\n0 5\n");
    let parse = run(&["connectivity", bad.to_str().unwrap()]);
    assert_eq!(parse.status.code(), Some(2));
    // Invariant/precondition failure: z4 on the Petersen graph.
    let g = run(&["family", "petersen"]);
    let pet = write_temp("pet2.txt", &stdout(&g));
    let fail = run(&["verify", "z4", pet.to_str().unwrap()]);
    assert_eq!(fail.status.code(), Some(1));
    // Missing --group for census count.
    let tri = write_temp("tri2.txt", "3 3\n0 1\n1 2\n2 0\n");
    let nogroup = run(&["census", "count", tri.to_str().unwrap()]);
    assert_eq!(nogroup.status.code(), Some(2));
}

#[test]
fn random_family_is_seed_deterministic() {
    let a = run(&["family", "random_k_ec(5,6)", "--seed", "7"]);
    let b = run(&["family", "random_k_ec(5,6)", "--seed", "7"]);
    let c = run(&["family", "random_k_ec(5,6)", "--seed", "8"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
    assert!(stdout(&a).starts_with("# random_k_ec attempts:"));
}

#[test]
fn cover_summary_identity() {
    let g = run(&["family", "petersen"]);
    let path = write_temp("pet3.txt", &stdout(&g));
    let out = run(&["cover", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let field = |name: &str| -> usize {
        text.lines()
            .find(|l| l.starts_with(name))
            .and_then(|l| l.split(": ").nth(1))
            .and_then(|v| v.parse().ok())
            .unwrap_or_else(|| panic!("missing field {name} in:\n{text}"))
    };
    let (k, p, x) = (field("chains"), field("cycles"), field("external"));
    // m = |X| + (n + p - k) + 2(k - 1) for n = 10, m = 15.
    assert_eq!(15, x + (10 + p - k) + 2 * (k - 1));
}
