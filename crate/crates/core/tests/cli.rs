//! End-to-end checks of the hamforge binary: build determinism, parse
//! diagnostics with the documented exit codes, solve output, and a verifier
//! run.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hamforge"))
}

#[test]
fn build_is_deterministic_and_solvable() {
    let dir = std::env::temp_dir().join(format!("hamforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("yes.spec");
    std::fs::write(&spec, "circuit 1 0\ngate id 0\nquery 0.25 0.75 proj1\n").unwrap();

    let out1 = dir.join("a.instance");
    let out2 = dir.join("b.instance");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["build", "cooklevin"])
            .arg(&spec)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "build output must be byte-identical across runs");

    let solve = bin().arg("solve").arg(&out1).output().unwrap();
    assert!(solve.status.success());
    let stdout = String::from_utf8(solve.stdout).unwrap();
    // the copy machine over a YES query accepts: <Z_out> = -1 on the ground state
    assert!(stdout.contains("VERDICT=1"), "solve output:\n{stdout}");
    assert!(stdout.contains("GROUND_OBS=-1"), "solve output:\n{stdout}");
}

#[test]
fn malformed_spec_exits_2() {
    let dir = std::env::temp_dir().join(format!("hamforge-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("bad.spec");
    std::fs::write(&spec, "query nonsense\n").unwrap();
    let out = bin().args(["build", "query"]).arg(&spec).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line"), "diagnostic: {stderr}");
}

#[test]
fn verify_union_passes_with_seed() {
    let out = bin()
        .args(["verify", "union", "--trials", "50", "--seed", "7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("SEED=7"));
    assert!(stdout.contains("PASS=1"));
}

#[test]
fn verify_unknown_lemma_exits_2() {
    let out = bin().args(["verify", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
