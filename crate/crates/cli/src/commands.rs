//! Subcommand bodies. Each writes its artifacts into the output directory
//! and returns the file names plus command-specific manifest entries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use jhj_core::condition::{a0, reduce_to_limiter};
use jhj_core::hamiltonian::Hamiltonian;
use jhj_core::ishii::{extremal_solutions, ishii_limiters, TwoDomainProblem};
use jhj_core::junction::{euclidean_csv, field_csv, EuclideanField, EuclideanGrid, Field, JunctionGrid, JunctionPoint};
use jhj_core::solver::{hopf_lax, solve, Problem, TimeSettings};
use jhj_core::vertex::VertexTestFunction;

use crate::config::{InitialSpec, PointSpec, RunConfig};
use crate::error::CliError;

#[derive(Default)]
pub struct Outcome {
    pub files: Vec<String>,
    pub extra: Map<String, Value>,
}

impl Outcome {
    fn write(&mut self, out: &Path, name: String, contents: &str) -> Result<(), CliError> {
        fs::write(out.join(&name), contents).map_err(|e| CliError::io(format!("writing {name}: {e}")))?;
        self.files.push(name);
        Ok(())
    }
}

fn header(columns: &[String]) -> String {
    let mut h = columns.join(",");
    h.push('\n');
    h
}

fn push_row(out: &mut String, values: &[f64]) {
    let row: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    writeln!(out, "{}", row.join(",")).unwrap();
}

fn p_columns(d: usize) -> Vec<String> {
    (0..d).map(|k| format!("p_{k}")).collect()
}

pub fn limiter_reduce(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let hs = cfg.require_hamiltonians()?;
    let f = cfg.junction_function(&hs)?;
    let points = cfg.limiter.clone().unwrap_or_default().points(cfg.dim);
    let rows = points
        .par_iter()
        .map(|p| Ok((a0(&hs, p)?, reduce_to_limiter(&f, &hs, p)?)))
        .collect::<Result<Vec<_>, jhj_core::Error>>()?;
    let mut cols = p_columns(cfg.dim);
    cols.extend(["a0".into(), "a_f".into()]);
    let mut csv = header(&cols);
    for (p, (base, af)) in points.iter().zip(&rows) {
        let mut v = p.clone();
        v.extend([*base, *af]);
        push_row(&mut csv, &v);
    }
    let mut o = Outcome::default();
    o.write(out, "limiter.csv".into(), &csv)?;
    o.extra.insert("points".into(), json!(points.len()));
    Ok(o)
}

fn vertex_function(cfg: &RunConfig) -> Result<VertexTestFunction, CliError> {
    let hs = cfg.require_hamiltonians()?;
    let limiter = cfg.limiter(&hs)?.ok_or_else(|| {
        CliError::config("junction", "the vertex test function needs a flux-limited junction condition")
    })?;
    Ok(VertexTestFunction::new(hs, limiter)?)
}

fn point(spec: &PointSpec, d: usize) -> JunctionPoint {
    let tangential = if spec.tangential.is_empty() { vec![0.0; d] } else { spec.tangential.clone() };
    if spec.branch == 0 {
        JunctionPoint::interface(tangential)
    } else {
        JunctionPoint::new(spec.branch - 1, tangential, spec.normal)
    }
}

fn file_branch(p: &JunctionPoint) -> f64 {
    if p.on_interface() {
        0.0
    } else {
        (p.branch + 1) as f64
    }
}

fn point_columns(name: &str, d: usize) -> Vec<String> {
    let mut c = vec![format!("{name}_branch")];
    c.extend((0..d).map(|k| format!("{name}_{k}")));
    c.push(format!("{name}_normal"));
    c
}

fn point_values(p: &JunctionPoint) -> Vec<f64> {
    let mut v = vec![file_branch(p)];
    v.extend(&p.tangential);
    v.push(if p.on_interface() { 0.0 } else { p.normal });
    v
}

/// Compatibility residual, NaN on the singular set.
fn residual(vtf: &VertexTestFunction, x: &JunctionPoint, y: &JunctionPoint) -> Result<f64, jhj_core::Error> {
    match vtf.gradient(x, y) {
        Ok((dx, dy)) => Ok(vtf.hamiltonian_at(&dy.negated())? - vtf.hamiltonian_at(&dx)?),
        Err(jhj_core::Error::SingularSet) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

pub fn vtf_eval(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let vtf = vertex_function(cfg)?;
    let pairs = cfg.vtf.as_ref().map(|v| v.pairs.clone()).unwrap_or_default();
    if pairs.is_empty() {
        return Err(CliError::config("vtf.pairs", "no pairs to evaluate"));
    }
    let d = cfg.dim;
    let mut cols = point_columns("x", d);
    cols.extend(point_columns("y", d));
    cols.extend(["value", "pair_i", "pair_j", "level", "converged", "residual"].map(String::from));
    let mut csv = header(&cols);
    for pair in &pairs {
        let (x, y) = (point(&pair.x, d), point(&pair.y, d));
        let ev = vtf.eval(&x, &y)?;
        let residual = residual(&vtf, &x, &y)?;
        let mut v = point_values(&x);
        v.extend(point_values(&y));
        v.extend([
            ev.value,
            (ev.branches.0 + 1) as f64,
            (ev.branches.1 + 1) as f64,
            ev.level,
            if ev.converged { 1.0 } else { 0.0 },
            residual,
        ]);
        push_row(&mut csv, &v);
    }
    let mut o = Outcome::default();
    o.write(out, "vtf_eval.csv".into(), &csv)?;
    Ok(o)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, d: usize, r: f64) -> JunctionPoint {
    let tangential: Vec<f64> = (0..d).map(|_| rng.gen_range(-r..r)).collect();
    if rng.gen_bool(0.1) {
        JunctionPoint::interface(tangential)
    } else {
        JunctionPoint::new(rng.gen_range(0..n), tangential, rng.gen_range(0.0..r))
    }
}

pub fn vtf_check(cfg: &RunConfig, out: &Path, seed: u64) -> Result<Outcome, CliError> {
    let vtf = vertex_function(cfg)?;
    let spec = cfg.vtf.clone().unwrap_or_default();
    let (d, n) = (cfg.dim, vtf.hamiltonians.len());
    let origin = JunctionPoint::interface(vec![0.0; d]);
    let g00 = vtf.eval(&origin, &origin)?.value;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(JunctionPoint, JunctionPoint)> = (0..spec.samples)
        .map(|_| (random_point(&mut rng, n, d, spec.radius), random_point(&mut rng, n, d, spec.radius)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|(x, y)| {
            let ev = vtf.eval(x, y)?;
            let residual = residual(&vtf, x, y)?;
            let diagonal = vtf.eval(x, x)?.value - g00;
            Ok((ev.value, residual, diagonal))
        })
        .collect::<Result<Vec<_>, jhj_core::Error>>()?;
    let mut cols = point_columns("x", d);
    cols.extend(point_columns("y", d));
    cols.extend(["value", "value_minus_origin", "residual", "diagonal_defect"].map(String::from));
    let mut csv = header(&cols);
    let (mut max_res, mut max_diag, mut min_gap) = (f64::NEG_INFINITY, 0.0f64, f64::INFINITY);
    for ((x, y), &(value, residual, diagonal)) in pairs.iter().zip(&rows) {
        let mut v = point_values(x);
        v.extend(point_values(y));
        v.extend([value, value - g00, residual, diagonal]);
        push_row(&mut csv, &v);
        if residual.is_finite() {
            max_res = max_res.max(residual);
        }
        max_diag = max_diag.max(diagonal.abs());
        min_gap = min_gap.min(value - g00);
    }
    let table = vtf.superlinearity_probe(&spec.radii, 50, seed.wrapping_add(1))?;
    let mut sup = header(&["r", "min_value", "ratio"].map(String::from));
    for (k, (r, g)) in table.iter().enumerate() {
        let ratio = if k > 0 { g / table[k - 1].1 } else { f64::NAN };
        push_row(&mut sup, &[*r, *g, ratio]);
    }
    let mut o = Outcome::default();
    o.write(out, "vtf_check.csv".into(), &csv)?;
    o.write(out, "superlinearity.csv".into(), &sup)?;
    o.extra.insert(
        "summary".into(),
        json!({
            "origin_value": g00,
            "max_residual": max_res,
            "max_diagonal_defect": max_diag,
            "min_value_minus_origin": min_gap,
            "samples": pairs.len(),
        }),
    );
    Ok(o)
}

fn initial_field(spec: &InitialSpec, grid: &Arc<JunctionGrid>) -> Result<Field, CliError> {
    match spec {
        InitialSpec::Table { values } => {
            if values.len() != grid.node_count() {
                return Err(CliError::config(
                    "initial.values",
                    format!("{} values for {} grid nodes", values.len(), grid.node_count()),
                ));
            }
            Ok(Field::new(grid.clone(), values.clone(), 0.0)?)
        }
        _ => Ok(Field::from_fn(grid.clone(), |x| {
            spec.eval(x.branch, &x.tangential, x.normal).expect("closed-form initial data")
        })),
    }
}

fn whole_space_value(spec: &InitialSpec, xt: &[f64], x: f64) -> Option<f64> {
    spec.eval(if x < 0.0 { 0 } else { 1 }, xt, x.abs())
}

fn settings(cfg: &RunConfig) -> Result<TimeSettings, CliError> {
    let t = cfg.require_time()?;
    let defaults = TimeSettings {
        final_time: t.final_time,
        snapshots: t.snapshots.clone(),
        cfl: t.cfl.unwrap_or(jhj_core::solver::DEFAULT_CFL),
        dt_max: t.dt_max.unwrap_or(jhj_core::solver::DEFAULT_DT_MAX),
        fixed: None,
    };
    defaults.validate().map_err(|e| CliError::config("time", e.to_string()))?;
    Ok(defaults)
}

pub fn run_solve(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let hs = cfg.require_hamiltonians()?;
    let grid = Arc::new(
        JunctionGrid::build(&cfg.require_grid()?.config(hs.len()))
            .map_err(|e| CliError::config("grid", e.to_string()))?,
    );
    let initial = initial_field(cfg.require_initial()?, &grid)?;
    let s = settings(cfg)?;
    let mut problem = match cfg.limiter(&hs)? {
        Some(limiter) => Problem::new(hs.clone(), limiter, initial, s.final_time)?,
        None => Problem::with_junction_function(hs.clone(), cfg.junction_function(&hs)?, initial, s.final_time)?,
    };
    problem.settings = s;
    problem.validate()?;
    let traj = solve(&problem)?;
    let mut o = Outcome::default();
    for (k, f) in traj.fields.iter().enumerate() {
        o.write(out, format!("snapshot_{k:03}.csv"), &field_csv(f))?;
    }
    o.extra.insert("times".into(), json!(traj.times()));
    o.extra.insert("steps".into(), json!(traj.steps));
    o.extra.insert("grid".into(), serde_json::to_value(&*grid).map_err(|e| CliError::io(e.to_string()))?);
    Ok(o)
}

pub fn ishii_compare(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let spec = cfg.ishii.as_ref().ok_or_else(|| CliError::config("ishii", "missing section"))?;
    let d = cfg.dim;
    let left = spec.left.build(d).map_err(|e| CliError::config("ishii.left", e.to_string()))?;
    let right = spec.right.build(d).map_err(|e| CliError::config("ishii.right", e.to_string()))?;

    let points = spec.p_prime.points(d);
    let rows =
        points.par_iter().map(|p| ishii_limiters(&left, &right, p)).collect::<Result<Vec<_>, jhj_core::Error>>()?;
    let mut cols = p_columns(d);
    cols.extend(["a0", "a_star", "a_i_minus", "a_i_plus"].map(String::from));
    let mut csv = header(&cols);
    for (p, l) in points.iter().zip(&rows) {
        let mut v = p.clone();
        v.extend([l.a0, l.a_star, l.minus, l.plus]);
        push_row(&mut csv, &v);
    }

    let grid = Arc::new(
        EuclideanGrid::build(&cfg.require_grid()?.config(2)).map_err(|e| CliError::config("grid", e.to_string()))?,
    );
    let init = cfg.require_initial()?;
    let initial = match init {
        InitialSpec::Table { values } => {
            if values.len() != grid.node_count() {
                return Err(CliError::config(
                    "initial.values",
                    format!("{} values for {} grid nodes", values.len(), grid.node_count()),
                ));
            }
            EuclideanField { grid: grid.clone(), values: values.clone(), time: 0.0 }
        }
        _ => EuclideanField::from_fn(grid.clone(), |xt, x| {
            whole_space_value(init, xt, x).expect("closed-form initial data")
        }),
    };
    let s = settings(cfg)?;
    let mut problem = TwoDomainProblem::new(left, right, initial, s.final_time);
    problem.settings = s;
    let sols = extremal_solutions(&problem)?;

    let mut o = Outcome::default();
    o.write(out, "limiters.csv".into(), &csv)?;
    for (k, (lo, hi)) in sols.minimal.fields.iter().zip(&sols.maximal.fields).enumerate() {
        o.write(out, format!("minimal_{k:03}.csv"), &euclidean_csv(lo))?;
        o.write(out, format!("maximal_{k:03}.csv"), &euclidean_csv(hi))?;
    }
    let times: Vec<f64> = sols.minimal.fields.iter().map(|f| f.time).collect();
    let gap = sols
        .minimal
        .fields
        .iter()
        .zip(&sols.maximal.fields)
        .flat_map(|(a, b)| a.values.iter().zip(&b.values).map(|(x, y)| y - x))
        .fold(0.0f64, f64::max);
    o.extra.insert("times".into(), json!(times));
    o.extra.insert("steps".into(), json!(sols.minimal.steps));
    o.extra.insert("max_gap".into(), json!(gap));
    Ok(o)
}

pub fn oracle_hopf_lax(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let d = cfg.dim;
    let spec = cfg.oracle.clone().unwrap_or(crate::config::OracleSpec { hamiltonian: None, t: None, points: None });
    let h: Arc<dyn Hamiltonian> = match &spec.hamiltonian {
        Some(h) => h.build(d).map_err(|e| CliError::config("oracle.hamiltonian", e.to_string()))?,
        None => cfg.require_hamiltonians()?.remove(0),
    };
    let t = match (spec.t, &cfg.time) {
        (Some(t), _) => t,
        (None, Some(time)) => time.final_time,
        (None, None) => return Err(CliError::config("oracle.t", "no evaluation time given")),
    };
    let init = cfg.require_initial()?;
    if matches!(init, InitialSpec::Table { .. }) {
        return Err(CliError::config("initial.kind", "the Hopf-Lax oracle needs closed-form initial data"));
    }
    let points = match spec.points {
        Some(p) => p,
        None => {
            let grid = EuclideanGrid::build(&cfg.require_grid()?.config(2))
                .map_err(|e| CliError::config("grid", e.to_string()))?;
            (0..grid.node_count())
                .map(|i| {
                    let (mut xt, x) = grid.coords(i);
                    xt.push(x);
                    xt
                })
                .collect()
        }
    };
    let u0 = |y: &[f64]| whole_space_value(init, &y[..d], y[d]).expect("closed-form initial data");
    let values = points.par_iter().map(|x| hopf_lax(&h, u0, t, x)).collect::<Result<Vec<_>, jhj_core::Error>>()?;
    let mut cols: Vec<String> = (0..d).map(|k| format!("x_{k}")).collect();
    cols.extend(["x".into(), "value".into()]);
    let mut csv = header(&cols);
    for (p, v) in points.iter().zip(&values) {
        let mut row = p.clone();
        row.push(*v);
        push_row(&mut csv, &row);
    }
    let mut o = Outcome::default();
    o.write(out, "hopf_lax.csv".into(), &csv)?;
    o.extra.insert("t".into(), json!(t));
    Ok(o)
}
