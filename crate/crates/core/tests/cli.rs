use std::process::{Command, Output};

fn type2amp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_type2amp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn quantize_reports_worked_example() {
    let linear = type2amp(&["quantize", "--amplitudes", "0.5,1", "--method", "linear"]);
    assert!(linear.status.success());
    assert!(stdout(&linear).contains("rnsqe: 0.25\n"));

    let optimal = type2amp(&["quantize", "--amplitudes", "0.5,1", "--method", "optimal"]);
    let text = stdout(&optimal);
    assert!(text.contains("wb_amplitude: 1\n"), "{text}");
    assert!(text.contains("r_vector: 0.5,1\n"), "{text}");
    assert!(text.contains("rnsqe: 0\n"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(type2amp(&[]).status.code(), Some(1));
    assert_eq!(type2amp(&["bogus"]).status.code(), Some(1));
    let bad = type2amp(&["quantize", "--amplitudes", "0,0", "--method", "optimal"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
    let unwritable = type2amp(&["sweep", "--trials", "1", "--out", "/nonexistent-dir/s.csv"]);
    assert_eq!(unwritable.status.code(), Some(2));
}

#[test]
fn sweep_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = type2amp(&[
        "sweep",
        "--subbands",
        "6",
        "--variances",
        "0.1,2",
        "--min-amplitudes",
        "1,4",
        "--trials",
        "300",
        "--seed",
        "17",
        "--oracle-check",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("min_amplitude,variance,method,rms_nsqe,mean_nsqe,trials,seed")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 3);
    assert!(!csv.contains('\r'));
    let methods: Vec<&str> = rows[..3].iter().map(|r| r[2]).collect();
    assert_eq!(methods, ["linear", "optimal", "suboptimal"]);
    assert_eq!((rows[0][0], rows[0][1]), ("1", "0.1"));
    assert_eq!((rows[11][0], rows[11][1]), ("4", "2"));
    for r in &rows {
        assert_eq!(r.len(), 7);
        assert_eq!(r[5], "300");
        assert_eq!(r[6], "17");
        let rms: f64 = r[3].parse().unwrap();
        let mean: f64 = r[4].parse().unwrap();
        assert!(rms >= 0.0 && rms >= mean * (1.0 - 1e-9));
    }
}

#[test]
fn hex_and_decimal_seeds_match() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, name: &str| {
        let path = dir.path().join(name);
        let o = type2amp(&[
            "sweep",
            "--trials",
            "50",
            "--variances",
            "1",
            "--min-amplitudes",
            "2",
            "--seed",
            seed,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("255", "a.csv"), run("0xff", "b.csv"));
}
