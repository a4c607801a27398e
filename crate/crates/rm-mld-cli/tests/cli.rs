//! Binary-level tests: exit codes, stdin/file plumbing, byte-for-byte
//! determinism of seeded runs.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn rm_mld(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rm-mld"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rm_mld_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rm-mld"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn encode_decode_round_trip_via_stdin() {
    let info = "1011001110001011";
    let enc = rm_mld_stdin(
        &["encode", "--r", "2", "--m", "5", "--info-set", "type1"],
        info,
    );
    assert_eq!(enc.status.code(), Some(0));
    let codeword = stdout_of(&enc).trim().to_string();
    assert_eq!(codeword.len(), 32);
    assert_eq!(&codeword[..16], info, "systematic prefix");

    // Corrupt three positions and decode at the information positions.
    let mut corrupted: Vec<u8> = codeword.bytes().collect();
    for &p in &[2usize, 19, 31] {
        corrupted[p] = if corrupted[p] == b'0' { b'1' } else { b'0' };
    }
    let corrupted = String::from_utf8(corrupted).unwrap();
    let dec = rm_mld_stdin(
        &[
            "decode",
            "--r",
            "2",
            "--m",
            "5",
            "--family",
            "witness:rm25-type1-30",
        ],
        &corrupted,
    );
    assert_eq!(dec.status.code(), Some(0));
    let text = stdout_of(&dec);
    assert!(text.contains(&format!("info: {info}")), "{text}");
    assert!(text.contains("consistent: true"), "{text}");
}

#[test]
fn full_decode_reports_flips() {
    let zero_cw = "0".repeat(32);
    let mut corrupted: Vec<u8> = zero_cw.bytes().collect();
    corrupted[7] = b'1';
    let corrupted = String::from_utf8(corrupted).unwrap();
    let dec = rm_mld_stdin(
        &["decode", "--r", "2", "--m", "5", "--family", "full"],
        &corrupted,
    );
    assert_eq!(dec.status.code(), Some(0));
    let text = stdout_of(&dec);
    assert!(text.contains(&format!("corrected: {zero_cw}")), "{text}");
    assert!(text.contains("flips: {7}"), "{text}");
    assert!(text.contains("consistent: true"), "{text}");
}

#[test]
fn punctured_decode_from_31_symbols() {
    let enc = rm_mld_stdin(
        &["encode", "--r", "2", "--m", "5", "--info-set", "type1"],
        "1111000011110000",
    );
    let codeword = stdout_of(&enc).trim().to_string();
    let mut short: Vec<u8> = codeword.bytes().take(31).collect();
    short[30] = if short[30] == b'0' { b'1' } else { b'0' };
    short[5] = if short[5] == b'0' { b'1' } else { b'0' };
    let short = String::from_utf8(short).unwrap();
    let dec = rm_mld_stdin(
        &[
            "decode",
            "--r",
            "2",
            "--m",
            "5",
            "--family",
            "witness:rm25-type1-30",
            "--punctured",
        ],
        &short,
    );
    assert_eq!(dec.status.code(), Some(0));
    assert!(stdout_of(&dec).contains("info: 1111000011110000"));
}

#[test]
fn usage_errors_exit_2() {
    // Bad bit string length.
    let bad = rm_mld_stdin(
        &["encode", "--r", "2", "--m", "5", "--info-set", "type1"],
        "101",
    );
    assert_eq!(bad.status.code(), Some(2));
    // Unknown witness.
    let bad = rm_mld(&[
        "family", "--r", "2", "--m", "5", "--family", "witness:nope",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    // Representatives only exist for r=2, m=5.
    let bad = rm_mld_stdin(
        &["encode", "--r", "2", "--m", "4", "--info-set", "type3"],
        "10110011101",
    );
    assert_eq!(bad.status.code(), Some(2));
    // Clap-level usage error.
    let bad = rm_mld(&["tables"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn tables_pass_and_exit_zero() {
    for which in ["1", "2", "3", "5"] {
        let out = rm_mld(&["tables", which]);
        assert_eq!(out.status.code(), Some(0), "table {which}");
        assert!(stdout_of(&out).contains("all match"), "table {which}");
    }
    let out = rm_mld(&["tables", "4", "--fast"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = [
        "simulate", "--r", "2", "--m", "4", "--family", "witness:rm24-6", "--weights", "0..2",
        "--trials", "300", "--seed", "17",
    ];
    let a = rm_mld(&args);
    let b = rm_mld(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout_of(&a), stdout_of(&b));
    assert!(stdout_of(&a).contains("seed=17"));

    let s1 = rm_mld(&[
        "family", "--r", "2", "--m", "4", "--family", "search", "--seed", "5", "--budget", "2000",
    ]);
    let s2 = rm_mld(&[
        "family", "--r", "2", "--m", "4", "--family", "search", "--seed", "5", "--budget", "2000",
    ]);
    assert_eq!(stdout_of(&s1), stdout_of(&s2));
}

#[test]
fn family_file_round_trip_through_decode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("searched.fam");
    let out = rm_mld(&[
        "family",
        "--r",
        "2",
        "--m",
        "4",
        "--family",
        "witness:rm24-6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Use the written family file as the decode source.
    let spec_sel = format!("@{}", path.display());
    let enc = rm_mld_stdin(
        &["encode", "--r", "2", "--m", "4", "--info-set", "canonical"],
        "10110011100",
    );
    let codeword = stdout_of(&enc).trim().to_string();
    let mut corrupted: Vec<u8> = codeword.bytes().collect();
    corrupted[9] = if corrupted[9] == b'0' { b'1' } else { b'0' };
    let corrupted = String::from_utf8(corrupted).unwrap();
    let dec = rm_mld_stdin(
        &["decode", "--r", "2", "--m", "4", "--family", &spec_sel],
        &corrupted,
    );
    assert_eq!(dec.status.code(), Some(0), "{}", stdout_of(&dec));
    assert!(stdout_of(&dec).contains("info: 10110011100"));
}

#[test]
fn verify_passes() {
    let out = rm_mld(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("all") && text.contains("checks passed"), "{text}");
}

#[test]
fn records_format_is_json_lines() {
    let out = rm_mld(&["bounds", "--r", "2", "--m", "5", "--format", "records"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout_of(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["record"], "bounds");
        assert_eq!(v["ilp"], 28);
    }
}
