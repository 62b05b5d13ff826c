//! End-to-end tests of the `erpk` binary: pipelines, determinism across
//! independent processes, and the exit-code contract (0 ok, 2 params,
//! 3 I/O, 4 malformed input, 5 decode failure).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn erpk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erpk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, expected: i32) {
    assert_eq!(
        out.status.code(),
        Some(expected),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_input(dir: &Path, len: usize) -> PathBuf {
    let path = dir.join("input.bin");
    let data: Vec<u8> = (0..len).map(|i| (i * 31 % 251) as u8).collect();
    fs::write(&path, data).unwrap();
    path
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn pipeline_mds_round_trip() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 4096);
    let pkts = tmp.path().join("pkts");
    let out = erpk(&[
        "encode",
        input.to_str().unwrap(),
        "--out-dir",
        pkts.to_str().unwrap(),
        "--codec",
        "mds",
        "--l",
        "512",
        "--seed",
        "11",
    ]);
    assert_code(&out, 0);

    // k = ceil((4096*8 + 64) / 512) = 65, p = 130; drop to exactly k
    let out = erpk(&[
        "drop",
        pkts.to_str().unwrap(),
        "--model",
        "fixed",
        "--deliver",
        "65",
        "--seed",
        "3",
    ]);
    assert_code(&out, 0);
    assert!(pkts.join("drop_report.json").exists());

    let recovered = tmp.path().join("out.bin");
    let out = erpk(&[
        "decode",
        pkts.to_str().unwrap(),
        "--out",
        recovered.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert_eq!(fs::read(&input).unwrap(), fs::read(&recovered).unwrap());
}

#[test]
fn pipeline_cascade_round_trip() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 8000);
    let pkts = tmp.path().join("pkts");
    assert_code(
        &erpk(&[
            "encode",
            input.to_str().unwrap(),
            "--out-dir",
            pkts.to_str().unwrap(),
            "--codec",
            "cascade",
            "--l",
            "256",
            "--seed",
            "5",
        ]),
        0,
    );
    assert_code(
        &erpk(&[
            "drop",
            pkts.to_str().unwrap(),
            "--model",
            "iid",
            "--loss",
            "1/10",
            "--seed",
            "8",
        ]),
        0,
    );
    let recovered = tmp.path().join("out.bin");
    assert_code(
        &erpk(&[
            "decode",
            pkts.to_str().unwrap(),
            "--out",
            recovered.to_str().unwrap(),
        ]),
        0,
    );
    assert_eq!(fs::read(&input).unwrap(), fs::read(&recovered).unwrap());
}

#[test]
fn independent_runs_are_identical() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 3000);
    let run = |name: &str| -> Vec<(String, Vec<u8>)> {
        let pkts = tmp.path().join(name);
        assert_code(
            &erpk(&[
                "encode",
                input.to_str().unwrap(),
                "--out-dir",
                pkts.to_str().unwrap(),
                "--codec",
                "cascade",
                "--l",
                "512",
                "--seed",
                "42",
            ]),
            0,
        );
        assert_code(
            &erpk(&[
                "drop",
                pkts.to_str().unwrap(),
                "--model",
                "fixed",
                "--deliver",
                "70",
                "--seed",
                "9",
            ]),
            0,
        );
        let out = tmp.path().join(format!("{name}.bin"));
        assert_code(
            &erpk(&[
                "decode",
                pkts.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ]),
            0,
        );
        let mut all = dir_bytes(&pkts);
        all.push((
            "decoded".to_string(),
            fs::read(&out).unwrap(),
        ));
        all
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn drop_list_mode_removes_nothing() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 600);
    let pkts = tmp.path().join("pkts");
    assert_code(
        &erpk(&[
            "encode",
            input.to_str().unwrap(),
            "--out-dir",
            pkts.to_str().unwrap(),
        ]),
        0,
    );
    let before = dir_bytes(&pkts);
    let out = erpk(&[
        "drop",
        pkts.to_str().unwrap(),
        "--model",
        "iid",
        "--loss",
        "1/2",
        "--seed",
        "1",
        "--list",
    ]);
    assert_code(&out, 0);
    assert_eq!(before, dir_bytes(&pkts));
}

#[test]
fn exit_2_on_bad_params() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 100);
    let out = erpk(&[
        "encode",
        input.to_str().unwrap(),
        "--out-dir",
        tmp.path().join("x").to_str().unwrap(),
        "--c",
        "1",
    ]);
    assert_code(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("stretch factor must exceed 1"));

    // unknown subcommand is a usage error
    assert_code(&erpk(&["frobnicate"]), 2);
    // missing model flag
    let out = erpk(&[
        "drop",
        tmp.path().to_str().unwrap(),
        "--model",
        "fixed",
        "--seed",
        "0",
    ]);
    assert_code(&out, 2);
}

#[test]
fn exit_3_on_io_failure() {
    let tmp = TempDir::new().unwrap();
    let out = erpk(&[
        "encode",
        tmp.path().join("missing.bin").to_str().unwrap(),
        "--out-dir",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_code(&out, 3);

    let input = write_input(tmp.path(), 100);
    let out = erpk(&[
        "bench",
        "overhead",
        "--codec",
        "mds",
        "--n-bits",
        "8128",
        "--l",
        "512",
        "--fractions",
        "0.5,1",
        "--trials",
        "2",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_code(&out, 3);
    let _ = input;
}

#[test]
fn exit_4_on_malformed_packet() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 500);
    let pkts = tmp.path().join("pkts");
    assert_code(
        &erpk(&[
            "encode",
            input.to_str().unwrap(),
            "--out-dir",
            pkts.to_str().unwrap(),
        ]),
        0,
    );
    let victim = pkts.join("pkt_00000.erpk");
    let mut bytes = fs::read(&victim).unwrap();
    bytes[0] = b'X';
    fs::write(&victim, bytes).unwrap();

    let out = erpk(&[
        "decode",
        pkts.to_str().unwrap(),
        "--out",
        tmp.path().join("out.bin").to_str().unwrap(),
    ]);
    assert_code(&out, 4);
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("pkt_00000.erpk"),
        "error should name the offending file"
    );

    let out = erpk(&[
        "drop",
        pkts.to_str().unwrap(),
        "--model",
        "iid",
        "--loss",
        "0",
        "--seed",
        "0",
    ]);
    assert_code(&out, 4);
}

#[test]
fn exit_4_on_mixed_blocks() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 500);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        assert_code(
            &erpk(&[
                "encode",
                input.to_str().unwrap(),
                "--out-dir",
                dir.to_str().unwrap(),
                "--seed",
                seed,
            ]),
            0,
        );
    }
    // contaminate a with a packet from b
    fs::copy(b.join("pkt_00003.erpk"), a.join("pkt_90003.erpk")).unwrap();
    fs::remove_file(a.join("manifest.json")).unwrap();
    let out = erpk(&[
        "decode",
        a.to_str().unwrap(),
        "--out",
        tmp.path().join("out.bin").to_str().unwrap(),
    ]);
    assert_code(&out, 4);
}

#[test]
fn exit_4_on_manifest_mismatch() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 500);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        assert_code(
            &erpk(&[
                "encode",
                input.to_str().unwrap(),
                "--out-dir",
                dir.to_str().unwrap(),
                "--seed",
                seed,
            ]),
            0,
        );
    }
    fs::copy(b.join("manifest.json"), a.join("manifest.json")).unwrap();
    let out = erpk(&[
        "decode",
        a.to_str().unwrap(),
        "--out",
        tmp.path().join("out.bin").to_str().unwrap(),
    ]);
    assert_code(&out, 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("manifest"));
}

#[test]
fn exit_5_on_insufficient_data() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 4096);
    let pkts = tmp.path().join("pkts");
    assert_code(
        &erpk(&[
            "encode",
            input.to_str().unwrap(),
            "--out-dir",
            pkts.to_str().unwrap(),
            "--codec",
            "cascade",
            "--l",
            "512",
        ]),
        0,
    );
    // keep fewer than k = 65 packets
    assert_code(
        &erpk(&[
            "drop",
            pkts.to_str().unwrap(),
            "--model",
            "fixed",
            "--deliver",
            "10",
            "--seed",
            "4",
        ]),
        0,
    );
    let out = erpk(&[
        "decode",
        pkts.to_str().unwrap(),
        "--out",
        tmp.path().join("out.bin").to_str().unwrap(),
    ]);
    assert_code(&out, 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient"));
}

#[test]
fn decode_without_manifest_warns_and_succeeds() {
    let tmp = TempDir::new().unwrap();
    let input = write_input(tmp.path(), 700);
    let pkts = tmp.path().join("pkts");
    assert_code(
        &erpk(&[
            "encode",
            input.to_str().unwrap(),
            "--out-dir",
            pkts.to_str().unwrap(),
        ]),
        0,
    );
    fs::remove_file(pkts.join("manifest.json")).unwrap();
    let out = erpk(&[
        "decode",
        pkts.to_str().unwrap(),
        "--out",
        tmp.path().join("out.bin").to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(
        fs::read(&input).unwrap(),
        fs::read(tmp.path().join("out.bin")).unwrap()
    );
}

#[test]
fn bench_throughput_writes_csv_and_verdict() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("tp.csv");
    let out = erpk(&[
        "bench",
        "throughput",
        "--codec",
        "mds",
        "--sizes",
        "4096,8192",
        "--l",
        "512",
        "--trials",
        "1",
        "--seed",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("linearity"));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("codec,n_bits,l_bits,trials,encode_s,decode_s"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn bench_overhead_writes_step_curve() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("oh.csv");
    let out = erpk(&[
        "bench",
        "overhead",
        "--codec",
        "mds",
        "--n-bits",
        "8128",
        "--l",
        "512",
        "--fractions",
        "0.4,0.5,1",
        "--trials",
        "20",
        "--seed",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "codec,k,p,l_bits,fraction,trials,successes,success_rate");
    assert!(lines[1].ends_with("0.0000"), "below k must always fail: {}", lines[1]);
    assert!(lines[2].ends_with("1.0000"), "exactly k must always work: {}", lines[2]);
    assert!(lines[3].ends_with("1.0000"));
}
