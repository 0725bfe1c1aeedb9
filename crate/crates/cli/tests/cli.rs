use std::process::{Command, Output};

fn perc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perc")).args(args).env_remove("PERC_SEED").output().expect("spawn perc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_small_suite_passes() {
    let o = perc(&["verify", "--max-edges", "17"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let body: serde_json::Value = serde_json::from_str(stdout(&o).lines().nth(1).unwrap()).unwrap();
    assert_eq!(body["pass"], true);
}

#[test]
fn quintic_fixed_point() {
    let o = perc(&["fixedpoint", "--map", "quintic"]);
    assert_eq!(o.status.code(), Some(0));
    let body: serde_json::Value = serde_json::from_str(stdout(&o).lines().nth(1).unwrap()).unwrap();
    let root = body["result"]["root"].as_f64().unwrap();
    assert!((root - 0.9514).abs() < 1e-3, "{root}");
}

#[test]
fn cross_interval_covers_one_half() {
    let o = perc(&["cross", "--region", "rect:0,0,2,1", "--event", "h", "--p", "0.5", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# perc "));
    assert_eq!(lines.next().unwrap(), "region,event,p,samples,successes,p_hat,ci_lo,ci_hi,seed");
    let row: Vec<&str> = lines.next().unwrap().rsplit(',').collect();
    let (hi, lo): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
    assert!(lo <= 0.5 && 0.5 <= hi, "[{lo}, {hi}]");
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = perc(&["cross", "--region", "rect:0,0,2,1", "--p", "0.5", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = perc(&["cross", "--region", "rect:0,0,2,1", "--p", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn worker_count_does_not_change_output() {
    let base = ["sweep", "--region", "rect:0,0,6,5", "--grid", "0.3,0.5,0.7", "--samples", "3000", "--seed", "11"];
    let run = |w: &str| {
        let mut a = base.to_vec();
        a.extend(["--workers", w]);
        stdout(&perc(&a))
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn header_echoes_seed() {
    let o = Command::new(env!("CARGO_BIN_EXE_perc"))
        .args(["cross", "--region", "rect:0,0,1,1", "--p", "0.5", "--samples", "100"])
        .env("PERC_SEED", "42")
        .output()
        .unwrap();
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("# perc ") && first.ends_with("seed=42"), "{first}");

    let o = perc(&["fixedpoint", "--map", "quartic", "--seed", "3"]);
    let header: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(header["tool"], "perc");
    assert_eq!(header["seed"], 3);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("perc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "# defaults\nregion = rect:0,0,2,1\np = 0.9\nsamples = 50\n").unwrap();
    let o = perc(&["cross", "--config", path.to_str().unwrap(), "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let row = out.lines().nth(2).unwrap();
    assert!(row.starts_with("rect:0,0,2,1,H[0,0,2,1],0.5,50,"), "{row}");
}
