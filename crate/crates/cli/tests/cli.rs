//! End-to-end runs of the `syk-sim` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use syk_sim::syk::{CouplingRecord, CouplingSet};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_syk-sim"))
}

fn run(args: &[&str], config: Option<&str>, out: &Path) -> Output {
    let dir = out.parent().unwrap();
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(out);
    if let Some(text) = config {
        let path = dir.join(format!(
            "{}.toml",
            out.file_name().unwrap().to_string_lossy()
        ));
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "status {:?}\n{}",
        o.status,
        String::from_utf8_lossy(&o.stderr)
    );
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Column `name` of a CSV as numbers.
fn column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == name)
        .unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn couplings_writes_one_pair_of_files_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    ok(&run(
        &["couplings"],
        Some("master_seed = 11\n[model]\nsamples = 8\nn_majorana = 8\n"),
        &out,
    ));
    let csvs: Vec<_> = (0..8)
        .map(|i| out.join(format!("coefficients_{i:03}.csv")))
        .collect();
    for p in &csvs {
        let text = read(p.clone());
        assert!(text.starts_with("sample_seed,kind,i,j,k,l,value\n"));
        let r = rows(&text);
        assert_eq!(r.len(), 70 + 28);
        assert_eq!(r.iter().filter(|x| x[1] == "J").count(), 70);
        assert_eq!(r.iter().filter(|x| x[1] == "C").count(), 28);
    }
    assert!(!out.join("coefficients_008.csv").exists());
    let rec: CouplingRecord = serde_json::from_str(&read(out.join("couplings_000.json"))).unwrap();
    let set = CouplingSet::try_from(rec).unwrap();
    assert_eq!(set.quadruples().len(), 70);

    let again = dir.path().join("c2");
    ok(&run(
        &["couplings", "--seed", "11"],
        Some("[model]\nsamples = 8\n"),
        &again,
    ));
    for i in 0..8 {
        let name = format!("couplings_{i:03}.json");
        assert_eq!(read(out.join(&name)), read(again.join(&name)));
    }
}

#[test]
fn single_cell_fidelity_surface_at_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f");
    let cfg = "[fidelity]\nln_tau = { lo = 2.0, hi = 2.0, points = 1 }\nlog10_n = { lo = 1.55, hi = 1.55, points = 1 }\n";
    ok(&run(&["fidelity-surface"], Some(cfg), &out));
    let text = read(out.join("fidelity_surface.csv"));
    assert!(text.starts_with("ln_tau,log10_n,fidelity\n"));
    let fid = column(&text, "fidelity");
    assert_eq!(fid.len(), 1);
    assert!(fid[0] > 0.99, "{}", fid[0]);
}

#[test]
fn correlation_files_and_symmetries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k");
    let cfg = "[model]\nsamples = 3\n[correlation]\nbetas = [0.0, 1.0]\nmus = [-5.0, 0.0, 5.0]\ntau = { ln_lo = -2.0, ln_hi = 2.0, points = 9 }\n";
    ok(&run(&["correlation"], Some(cfg), &out));
    let per = read(out.join("correlation_samples.csv"));
    assert!(per.starts_with("sample_seed,beta,mu,tau,re_D,im_D,abs_D_normalized\n"));
    assert_eq!(rows(&per).len(), 2 * 3 * 3 * 10);
    for r in rows(&per).iter().filter(|r| r[3] == "0") {
        assert!((r[6].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
    let agg = read(out.join("correlation_aggregate.csv"));
    assert!(agg.starts_with("beta,mu,tau,avg_abs_D,stderr\n"));
    let r = rows(&agg);
    let curve = |beta: &str, mu: &str| -> Vec<f64> {
        r.iter()
            .filter(|x| x[0] == beta && x[1] == mu)
            .map(|x| x[3].parse().unwrap())
            .collect()
    };
    let (plus, minus) = (curve("0", "5"), curve("0", "-5"));
    assert_eq!(plus.len(), 10);
    for (a, b) in plus.iter().zip(&minus) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!((curve("1", "0")[0] - 1.0).abs() < 1e-12);
    assert!(
        read(out.join("saturation.csv")).starts_with("beta,mu,saturation,stderr,window_points\n")
    );
}

#[test]
fn trotter_engine_flag_is_recorded_and_close_to_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "trotter_steps = 200\n[model]\nsamples = 1\nn_majorana = 6\n[correlation]\nbetas = [1.0]\nmus = [5.0]\ntau = { ln_lo = -1.0, ln_hi = 0.5, points = 8 }\n";
    let (a, b) = (dir.path().join("exact"), dir.path().join("trotter"));
    ok(&run(&["correlation"], Some(cfg), &a));
    ok(&run(&["correlation", "--engine", "trotter"], Some(cfg), &b));
    let m: serde_json::Value = serde_json::from_str(&read(b.join("manifest.json"))).unwrap();
    assert_eq!(m["config"]["engine"], "trotter");
    let ea = column(&read(a.join("correlation_aggregate.csv")), "avg_abs_D");
    let eb = column(&read(b.join("correlation_aggregate.csv")), "avg_abs_D");
    for (x, y) in ea.iter().zip(&eb) {
        assert!((x - y).abs() < 1e-2, "{x} vs {y}");
    }
}

#[test]
fn scaling_smoke_run_is_quick() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let t = Instant::now();
    ok(&run(
        &["scaling"],
        Some("[scaling]\nn_list = [6]\nmus = [0.0, 5.0]\nsamples = 1\n"),
        &out,
    ));
    assert!(t.elapsed().as_secs_f64() < 5.0);
    let text = read(out.join("scaling.csv"));
    assert!(text.starts_with("N,mu,beta,samples,saturation,stderr\n"));
    assert_eq!(rows(&text).len(), 2);
}

#[test]
fn compile_emits_all_sequences_with_gate_law_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    ok(&run(
        &["compile"],
        Some("[compile]\nverify = true\ntau = 0.7\n"),
        &out,
    ));
    let seqs: Vec<serde_json::Value> =
        serde_json::from_str(&read(out.join("sequences.json"))).unwrap();
    assert_eq!(seqs.len(), 70);
    for s in &seqs {
        let k = s["weight"].as_u64().unwrap();
        let n = |key: &str| s[key].as_u64().unwrap();
        let (one, two) = (n("conjugation_one_body"), n("conjugation_two_body"));
        if k >= 3 {
            assert_eq!(one + two, 7 * (k - 2));
            assert_eq!(two, 2 * (k - 2));
        }
        // two basis changes per X or Y letter, one core rotation
        let letters = s["term"]
            .as_str()
            .unwrap()
            .rsplit(' ')
            .next()
            .unwrap()
            .to_string();
        let xy = letters.chars().filter(|c| *c == 'X' || *c == 'Y').count() as u64;
        assert_eq!(n("basis_change"), 2 * xy);
        assert_eq!(n("one_body") + n("two_body"), one + two + 2 * xy + 1);
        assert!(s["fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
    }
    let res = read(out.join("resources.csv"));
    assert!(res.starts_with("N,m,n,one_body,two_body,total\n8,70,"));
    let m: serde_json::Value = serde_json::from_str(&read(out.join("manifest.json"))).unwrap();
    assert_eq!(m["details"]["chain_identity_check"]["verbatim_ok"], true);
    assert!(m["details"]["min_fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
}

#[test]
fn grape_writes_field_trace_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    ok(&run(&["grape"], None, &out));
    let field = read(out.join("field.csv"));
    assert!(field.starts_with("slice,amplitude_hz,phase_rad\n"));
    assert_eq!(rows(&field).len(), 100);
    let header: serde_json::Value =
        serde_json::from_str(&read(out.join("field_header.json"))).unwrap();
    assert_eq!(header["M"], 100);
    let obj = column(&read(out.join("trace.csv")), "objective");
    assert!(obj.windows(2).all(|w| w[1] >= w[0]));
    assert!(*obj.last().unwrap() >= 0.99);
    let prof = read(out.join("robustness.csv"));
    assert!(prof.starts_with("rf_scale,fidelity\n"));
    assert_eq!(rows(&prof).len(), 5);
}

#[test]
fn exit_codes_by_failure_kind() {
    let dir = tempfile::tempdir().unwrap();
    // config: unknown key, odd N, over the qubit cap
    for (i, cfg) in [
        "[model]\nsampels = 2\n",
        "[model]\nn_majorana = 7\n",
        "[scaling]\nn_list = [26]\nsamples = 1\n",
    ]
    .iter()
    .enumerate()
    {
        let cmd = if i == 2 { "scaling" } else { "couplings" };
        let o = run(&[cmd], Some(cfg), &dir.path().join(format!("cfg{i}")));
        assert_eq!(
            o.status.code(),
            Some(2),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    // numerical degeneracy: the pair operator underflows
    let cfg = "[model]\nsamples = 1\nj2 = 1e-200\n[correlation]\nbetas = [0.0]\nmus = [0.0]\n";
    let o = run(&["correlation"], Some(cfg), &dir.path().join("deg"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    // convergence: unreachable goal in one iteration, files still written
    let out = dir.path().join("conv");
    let o = run(
        &["grape"],
        Some("[grape]\nmax_iter = 1\nfidelity_goal = 0.999\n"),
        &out,
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(out.join("trace.csv").exists() && out.join("manifest.json").exists());
    // i/o: output path below a regular file
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let o = run(&["couplings"], None, &file.join("sub"));
    assert_eq!(o.status.code(), Some(5));
    // missing config file is an i/o error too
    let o = bin()
        .args(["couplings", "--config"])
        .arg(dir.path().join("absent.toml"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn manifest_rerun_reproduces_files() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let cfg = "master_seed = 5\n[model]\nsamples = 2\n[correlation]\nbetas = [20.0]\nmus = [5.0]\ntau = { ln_lo = 0.0, ln_hi = 2.0, points = 4 }\n";
    ok(&run(&["correlation", "--threads", "2"], Some(cfg), &first));
    let manifest = first.join("manifest.json");
    let second = dir.path().join("b");
    let o = bin()
        .args(["correlation", "--config"])
        .arg(&manifest)
        .arg("--out")
        .arg(&second)
        .output()
        .unwrap();
    ok(&o);
    let m: serde_json::Value = serde_json::from_str(&read(manifest.clone())).unwrap();
    let files = m["files"].as_object().unwrap();
    assert_eq!(files.len(), 3);
    for name in files.keys() {
        assert_eq!(
            std::fs::read(first.join(name)).unwrap(),
            std::fs::read(second.join(name)).unwrap(),
            "{name}"
        );
    }
    assert_eq!(read(manifest), read(second.join("manifest.json")));
    // a manifest only replays its own command
    let o = bin()
        .args(["scaling", "--config"])
        .arg(first.join("manifest.json"))
        .arg("--out")
        .arg(dir.path().join("c"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
