use std::path::{Path, PathBuf};

use phaseflow::flow::{coherent_pair, distance_series, nonmarkovianity, optimal_ordering, FlowOptions};
use phaseflow::fock::{trace_distance_states, FockOptions};
use phaseflow::par;
use phaseflow::phasespace::{kolmogorov_distance_states, sym_eigenvalues, KolmogorovOptions, Ordering};
use phaseflow::qbm::{trajectory, CLParams};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, opt, write_sidecar, CsvOutput};

/// Sweep cells with `N_tr` below this are flagged and get no relative error.
pub const BACKFLOW_FLOOR: f64 = 1e-9;

fn flow_options(cfg: &RunConfig) -> FlowOptions {
    let t = &cfg.tolerances;
    FlowOptions {
        fock: FockOptions { defect_tol: t.defect_tol, max_cutoff: t.max_cutoff },
        kolmogorov: KolmogorovOptions::with_tol(t.refine_tol),
    }
}

fn tag(p: &CLParams) -> String {
    format!("kT{}_gamma{}_Omega{}", p.kt, p.gamma, p.cutoff)
}

fn ordering_column(s: Ordering) -> String {
    match s.value() {
        v if v == 1.0 => "d_kol_P".into(),
        v if v == 0.0 => "d_kol_W".into(),
        v if v == -1.0 => "d_kol_Q".into(),
        v => format!("d_kol_s{v}"),
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

/// Runs `rows` and writes them after `header`; on a compute error the file
/// is left behind with its `.partial` suffix.
fn emit<F>(dir: &Path, name: &str, head: Vec<String>, rows: F) -> Result<PathBuf, CliError>
where
    F: FnOnce() -> Result<Vec<Vec<String>>, CliError>,
{
    let mut out = CsvOutput::create(dir, name, &head)?;
    match rows() {
        Ok(rows) => {
            for r in &rows {
                out.row(r)?;
            }
            out.finish()
        }
        Err(e) => {
            out.abandon();
            Err(e)
        }
    }
}

/// One `distances_*.csv` per `(kT, γ, Ω)` combination.
pub fn distances(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut orderings = cfg.orderings();
    orderings.sort_by(|a, b| b.value().total_cmp(&a.value()));
    let (a, b) = coherent_pair(cfg.displacement(), cfg.model.hbar)?;
    let grid = cfg.time_grid();
    let opts = flow_options(cfg);
    let mut head = header(&["t", "d_tr"]);
    head.extend(orderings.iter().map(|s| ordering_column(*s)));

    let mut written = Vec::new();
    for params in cfg.combinations() {
        let params = params?;
        let name = format!("distances_{}.csv", tag(&params));
        let path = emit(dir, &name, head.clone(), || {
            let s = distance_series((&a, &b), &params, &grid, &orderings, &opts)?;
            Ok((0..s.len())
                .map(|i| {
                    let mut r = vec![num(s.times[i]), num(s.d_tr[i])];
                    r.extend(s.d_kol.iter().map(|col| opt(col[i])));
                    r
                })
                .collect())
        })?;
        let side = json!({
            "columns": head,
            "params": params,
            "displacement": [cfg.displacement()[0], cfg.displacement()[1]],
        });
        written.push(write_sidecar(&path, "distances", cfg, side)?);
        written.push(path);
    }
    Ok(written)
}

/// Backflow of the trace and Wigner distances over a two-parameter grid,
/// written row-major (axis 1 outer).
pub fn sweep(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if cfg.time.n_steps == 0 {
        return Err(CliError::Config("a backflow sweep needs time.n_steps >= 1".into()));
    }
    let v1 = cfg.sweep.axis1.values();
    let v2 = cfg.sweep.axis2.values();
    let cells: Vec<CLParams> = v1
        .iter()
        .flat_map(|&x| v2.iter().map(move |&y| (x, y)))
        .map(|(x, y)| cfg.sweep_params(x, y))
        .collect::<Result<_, _>>()?;
    let (a, b) = coherent_pair(cfg.displacement(), cfg.model.hbar)?;
    let grid = cfg.time_grid();
    let opts = flow_options(cfg);
    let head = header(&["axis1", "axis2", "N_tr", "N_kol_W", "rel_err", "flagged"]);

    let path = emit(dir, "sweep.csv", head.clone(), || {
        let results = par::map_slice(&cells, |p| -> phaseflow::Result<(f64, f64)> {
            let s = distance_series((&a, &b), p, &grid, &[Ordering::WIGNER], &opts)?;
            let w: Vec<f64> = s.d_kol[0].iter().map(|v| v.expect("Wigner function is always regular")).collect();
            Ok((nonmarkovianity(&s.d_tr)?, nonmarkovianity(&w)?))
        });
        let mut rows = Vec::with_capacity(cells.len());
        for (k, r) in results.into_iter().enumerate() {
            let (n_tr, n_w) = r?;
            let (x, y) = (v1[k / v2.len()], v2[k % v2.len()]);
            let flagged = n_tr < BACKFLOW_FLOOR;
            let rel = (!flagged).then(|| (n_tr - n_w).abs() / n_tr);
            rows.push(vec![num(x), num(y), num(n_tr), num(n_w), opt(rel), u8::from(flagged).to_string()]);
        }
        Ok(rows)
    })?;
    let fixed = cfg.sweep_params(v1[0], v2[0])?;
    let side = json!({
        "columns": head,
        "axis1": { "name": cfg.sweep.axis1.name.label(), "values": v1 },
        "axis2": { "name": cfg.sweep.axis2.name.label(), "values": v2 },
        "fixed": { "omega0": fixed.omega0, "m0": fixed.m0, "hbar": fixed.hbar,
                   "kT": fixed.kt, "gamma": fixed.gamma, "Omega": fixed.cutoff },
        "t_max": cfg.time.t_max,
        "n_steps": cfg.time.n_steps,
        "backflow_floor": BACKFLOW_FLOOR,
    });
    Ok(vec![write_sidecar(&path, "sweep", cfg, side)?, path])
}

/// Deviation `d_kol(s) − d_tr` on a uniform s-grid followed by one row at
/// the bisection optimum.
pub fn sstar(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (a, b) = cfg.sstar_pair()?;
    if a == b {
        return Err(CliError::Compute(phaseflow::Error::DegeneratePair));
    }
    let opts = flow_options(cfg);
    let n = cfg.sstar.samples;
    let s_grid: Vec<f64> = (0..n).map(|k| if k == n - 1 { 1.0 } else { -1.0 + 2.0 * k as f64 / (n - 1) as f64 }).collect();
    let head = header(&["s", "d_kol_s", "d_tr", "deviation"]);
    let mut found = None;

    let path = emit(dir, "sstar.csv", head.clone(), || {
        let d_tr = trace_distance_states(&a, &b, &opts.fock)?.value;
        let kol = |s: f64| -> phaseflow::Result<Option<f64>> {
            match kolmogorov_distance_states(&a, &b, Ordering::new(s)?, &opts.kolmogorov) {
                Ok(v) => Ok(Some(v)),
                Err(phaseflow::Error::SingularOrdering { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        };
        let values = par::map_slice(&s_grid, |&s| kol(s)).into_iter().collect::<phaseflow::Result<Vec<_>>>()?;
        let best = optimal_ordering(&a, &b, cfg.tolerances.tol_s, &opts)?;
        let mut rows: Vec<Vec<String>> = s_grid
            .iter()
            .zip(&values)
            .map(|(s, v)| vec![num(*s), opt(*v), num(d_tr), opt(v.map(|v| v - d_tr))])
            .collect();
        let at = kol(best.s.value())?;
        rows.push(vec![num(best.s.value()), opt(at), num(d_tr), opt(at.map(|v| v - d_tr))]);
        found = Some(best);
        Ok(rows)
    })?;
    let best = found.expect("set on success");
    let side = json!({
        "columns": head,
        "samples": n,
        "last_row": "optimal ordering from bisection",
        "optimum": best,
    });
    Ok(vec![write_sidecar(&path, "sstar", cfg, side)?, path])
}

/// Covariance eigenvalues of the evolving state, ascending in each row.
pub fn covariance(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (a, _) = coherent_pair(cfg.displacement(), cfg.model.hbar)?;
    let grid = cfg.time_grid();
    let head = header(&["t", "sigma_eig1", "sigma_eig2"]);
    let mut written = Vec::new();
    for params in cfg.combinations() {
        let params = params?;
        let name = format!("covariance_{}.csv", tag(&params));
        let path = emit(dir, &name, head.clone(), || {
            let tr = trajectory(&a, &grid, &params)?;
            Ok(tr
                .times
                .iter()
                .zip(&tr.states)
                .map(|(t, g)| {
                    let (lo, hi) = sym_eigenvalues(&g.sigma());
                    vec![num(*t), num(lo), num(hi)]
                })
                .collect())
        })?;
        let side = json!({ "columns": head, "params": params });
        written.push(write_sidecar(&path, "covariance", cfg, side)?);
        written.push(path);
    }
    Ok(written)
}
