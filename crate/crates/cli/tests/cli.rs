use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nalgebra::Vector2;
use phaseflow::flow::{coherent_pair, distance_series, nonmarkovianity, FlowOptions};
use phaseflow::phasespace::Ordering;
use phaseflow::qbm::CLParams;

fn run(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_phaseflow"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

fn parse(s: &str) -> f64 {
    s.parse().unwrap()
}

const SHORT: &str = "
[model]
gamma = 1.0
Omega = 100.0
kT = [0.5, 2.0, 20.0]

[time]
t_max = 2.0
n_steps = 4
";

#[test]
fn distances_writes_one_file_per_combination() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["distances"], SHORT);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for kt in ["0.5", "2", "20"] {
        let path = dir.path().join(format!("out/distances_kT{kt}_gamma1_Omega100.csv"));
        let (head, rows) = read_csv(&path);
        assert_eq!(head, ["t", "d_tr", "d_kol_P", "d_kol_W", "d_kol_Q"]);
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0][2], "", "P is absent for coherent states at t = 0");
        assert_eq!(parse(&rows[4][0]), 2.0);
        for r in &rows {
            for f in r.iter().filter(|f| !f.is_empty()) {
                assert!(parse(f).is_finite());
            }
        }
        let side: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(path.with_extension("json")).unwrap()).unwrap();
        assert_eq!(side["command"], "distances");
        assert_eq!(side["config"]["time"]["n_steps"], 4);
        assert_eq!(side["params"]["kT"], parse(kt));
    }
}

#[test]
fn single_node_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["distances"], "[model]\nkT = 2.0\n[time]\nn_steps = 0\n");
    assert!(out.status.success());
    let (_, rows) = read_csv(&dir.path().join("out/distances_kT2_gamma1_Omega100.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(parse(&rows[0][0]), 0.0);
    let expect = (1.0 - (-16.0f64).exp()).sqrt();
    assert!((parse(&rows[0][1]) - expect).abs() < 1e-6);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[model]\nkT = 2.0\n[time]\nt_max = 1.0\nn_steps = 3\n";
    assert!(run(dir.path(), &["distances"], cfg).status.success());
    let path = dir.path().join("out/distances_kT2_gamma1_Omega100.csv");
    let first = fs::read(&path).unwrap();
    assert!(run(dir.path(), &["distances"], cfg).status.success());
    assert_eq!(first, fs::read(&path).unwrap());
}

#[test]
fn one_cell_sweep_matches_direct_backflow() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "
[model]
Omega = 1.0
[time]
t_max = 30.0
n_steps = 120
[sweep.axis1]
name = \"kT\"
min = 2.0
max = 2.0
n = 1
scale = \"linear\"
[sweep.axis2]
name = \"gamma\"
min = 0.5
max = 0.5
n = 1
scale = \"linear\"
";
    let out = run(dir.path(), &["sweep"], cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = read_csv(&dir.path().join("out/sweep.csv"));
    assert_eq!(head, ["axis1", "axis2", "N_tr", "N_kol_W", "rel_err", "flagged"]);
    assert_eq!(rows.len(), 1);

    let (a, b) = coherent_pair(Vector2::new(4.0 / 2f64.sqrt(), 0.0), 1.0).unwrap();
    let p = CLParams::new(1.0, 1.0, 0.5, 1.0, 2.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..=120).map(|k| if k == 120 { 30.0 } else { 30.0 * k as f64 / 120.0 }).collect();
    let s = distance_series((&a, &b), &p, &grid, &[Ordering::WIGNER], &FlowOptions::default()).unwrap();
    let n_tr = nonmarkovianity(&s.d_tr).unwrap();
    let w: Vec<f64> = s.d_kol[0].iter().map(|v| v.unwrap()).collect();
    assert_eq!(parse(&rows[0][2]), n_tr);
    assert_eq!(parse(&rows[0][3]), nonmarkovianity(&w).unwrap());
    assert_eq!(rows[0][5], "0");
}

#[test]
fn sweep_is_row_major_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "
[model]
gamma = 0.1
[time]
t_max = 5.0
n_steps = 20
[sweep.axis1]
name = \"kT\"
min = 1.0
max = 4.0
n = 2
scale = \"log\"
[sweep.axis2]
name = \"Omega\"
min = 1.0
max = 3.0
n = 3
scale = \"linear\"
";
    let out = run(dir.path(), &["sweep"], cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = read_csv(&dir.path().join("out/sweep.csv"));
    let cells: Vec<(f64, f64)> = rows.iter().map(|r| (parse(&r[0]), parse(&r[1]))).collect();
    assert_eq!(cells, [(1.0, 1.0), (1.0, 2.0), (1.0, 3.0), (4.0, 1.0), (4.0, 2.0), (4.0, 3.0)]);
    for r in &rows {
        if r[5] == "1" {
            assert_eq!(r[4], "");
        } else {
            assert!(parse(&r[4]).is_finite());
        }
    }
}

#[test]
fn sweep_needs_fixed_parameters() {
    let dir = tempfile::tempdir().unwrap();
    // kT and gamma are swept by default, so Omega must be a single value.
    let out = run(dir.path(), &["sweep"], "[model]\nOmega = [1.0, 2.0]\n");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sstar_minimal_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["sstar"], "[sstar]\nsamples = 3\n");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = read_csv(&dir.path().join("out/sstar.csv"));
    assert_eq!(head, ["s", "d_kol_s", "d_tr", "deviation"]);
    assert_eq!(rows.len(), 4);
    let s: Vec<f64> = rows.iter().map(|r| parse(&r[0])).collect();
    assert_eq!(&s[..3], [-1.0, 0.0, 1.0]);
    let dev: Vec<f64> = rows.iter().map(|r| parse(&r[3])).collect();
    assert!(dev[0] <= dev[1] && dev[1] <= dev[2]);
    // The optimum lies where the sampled deviation changes sign.
    let k = dev[..3].iter().position(|d| *d > 0.0).unwrap();
    assert!(s[k - 1] <= s[3] && s[3] <= s[k]);
    assert!(dev[3].abs() < 1e-3);
}

#[test]
fn sstar_defaults_bracket_the_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["sstar"], "");
    assert!(out.status.success());
    let (_, rows) = read_csv(&dir.path().join("out/sstar.csv"));
    assert_eq!(rows.len(), 202);
    let dev: Vec<f64> = rows[..201].iter().map(|r| parse(&r[3])).collect();
    assert!(dev.windows(2).all(|w| w[1] >= w[0] - 2e-4));
    assert!(dev[0] < 0.0 && dev[200] > 0.0);
    let side: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/sstar.json")).unwrap()).unwrap();
    assert!(side["optimum"]["boundary"].is_null());
}

#[test]
fn covariance_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["covariance"], "[model]\nkT = 20.0\ngamma = 0.1\n[time]\nt_max = 10.0\nn_steps = 10\n");
    assert!(out.status.success());
    let (head, rows) = read_csv(&dir.path().join("out/covariance_kT20_gamma0.1_Omega100.csv"));
    assert_eq!(head, ["t", "sigma_eig1", "sigma_eig2"]);
    assert_eq!(rows.len(), 11);
    assert_eq!((parse(&rows[0][1]), parse(&rows[0][2])), (1.0, 1.0));
    for r in &rows {
        assert!(parse(&r[1]) <= parse(&r[2]));
    }
    assert!(parse(&rows[10][2]) > 20.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["distances"], "[model]\ntemperature = 1.0\n").status.code(), Some(2));
    assert_eq!(run(dir.path(), &["distances"], "[model]\ngamma = -0.5\n").status.code(), Some(2));
    assert_eq!(run(dir.path(), &["distances"], "not toml at all [").status.code(), Some(2));

    // A cutoff limit far too small for the initial states is a compute error
    // and leaves the partial file behind.
    let out = run(dir.path(), &["distances"], "[model]\nkT = 2.0\n[tolerances]\nmax_cutoff = 4\n");
    assert_eq!(out.status.code(), Some(3));
    let out_dir = dir.path().join("out");
    assert!(out_dir.join("distances_kT2_gamma1_Omega100.csv.partial").exists());
    assert!(!out_dir.join("distances_kT2_gamma1_Omega100.csv").exists());

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let cfg = dir.path().join("run.toml");
    let out = Command::new(env!("CARGO_BIN_EXE_phaseflow"))
        .args(["covariance", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn printed_config_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["config"], SHORT);
    assert!(out.status.success());
    let printed = String::from_utf8(out.stdout).unwrap();
    let again = run(dir.path(), &["config"], &printed);
    assert_eq!(printed, String::from_utf8(again.stdout).unwrap());
    assert!(printed.contains("kT = [0.5, 2.0, 20.0]"));
}

#[test]
fn shipped_configs_are_valid() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        let out = Command::new(env!("CARGO_BIN_EXE_phaseflow")).arg("config").arg("--config").arg(&path).output().unwrap();
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        n += 1;
    }
    assert!(n >= 7);
}
