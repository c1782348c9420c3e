//! Run configuration: TOML or JSON, deserialized with field paths and then
//! cross-checked for consistency.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use jhj_core::condition::{FluxLimiter, JunctionFunction, JunctionSpec, LimiterSpec};
use jhj_core::hamiltonian::{Hamiltonian, HamiltonianSpec};
use jhj_core::junction::{AxisConfig, GridConfig, JunctionGrid};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Tangential dimension `d`.
    #[serde(default)]
    pub dim: usize,
    /// One Hamiltonian per branch.
    #[serde(default)]
    pub hamiltonians: Vec<HamiltonianSpec>,
    pub junction: Option<JunctionSpec>,
    pub grid: Option<GridSpec>,
    pub initial: Option<InitialSpec>,
    pub time: Option<TimeSpec>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub output_dir: Option<String>,
    pub limiter: Option<ReduceSpec>,
    pub vtf: Option<VtfSpec>,
    pub ishii: Option<IshiiSpec>,
    pub oracle: Option<OracleSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub tangential: Vec<AxisConfig>,
    pub normal_extent: f64,
    pub normal_spacing: f64,
}

/// Initial data. On the junction `|X| = (|x' - c'|^2 + x^2)^(1/2)` with `x`
/// the distance to the interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `min(|X|, cap)`.
    Cone {
        #[serde(default = "one")]
        cap: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `constant + a' . x' + slopes[i] x` on branch `i`.
    Affine {
        #[serde(default)]
        constant: f64,
        #[serde(default)]
        tangential: Vec<f64>,
        slopes: Vec<f64>,
    },
    /// `height (1 - |X|^2 / radius^2)_+^2`.
    Bump {
        height: f64,
        radius: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// Nodal values in grid order.
    Table { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub final_time: f64,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    pub cfl: Option<f64>,
    pub dt_max: Option<f64>,
}

/// Tensor sample of `p'`: `count` points per axis on `[min, max]`, or an
/// explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSpec {
    #[serde(default = "minus_one")]
    pub min: f64,
    #[serde(default = "one")]
    pub max: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    pub points: Option<Vec<Vec<f64>>>,
}

fn minus_one() -> f64 {
    -1.0
}

fn default_count() -> usize {
    21
}

impl Default for ReduceSpec {
    fn default() -> Self {
        ReduceSpec { min: -1.0, max: 1.0, count: default_count(), points: None }
    }
}

/// A junction point. Branches are numbered from 1; branch 0 (the default)
/// is the interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default)]
    pub branch: usize,
    #[serde(default)]
    pub tangential: Vec<f64>,
    #[serde(default)]
    pub normal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub x: PointSpec,
    pub y: PointSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VtfSpec {
    /// Pairs for `vtf eval`.
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
    /// Random pairs for `vtf check`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Normal coordinates of random points lie in `[0, radius]`, tangential
    /// ones in `[-radius, radius]`.
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
}

fn default_samples() -> usize {
    200
}

fn default_radius() -> f64 {
    3.0
}

fn default_radii() -> Vec<f64> {
    vec![8.0, 16.0, 32.0, 64.0]
}

impl Default for VtfSpec {
    fn default() -> Self {
        VtfSpec { pairs: Vec::new(), samples: default_samples(), radius: default_radius(), radii: default_radii() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IshiiSpec {
    pub left: HamiltonianSpec,
    pub right: HamiltonianSpec,
    #[serde(default)]
    pub p_prime: ReduceSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// Defaults to the first branch Hamiltonian.
    pub hamiltonian: Option<HamiltonianSpec>,
    /// Defaults to `time.final_time`.
    pub t: Option<f64>,
    /// Points `(x', x_{d+1})` of the whole space; defaults to the nodes of
    /// the unfolded grid.
    pub points: Option<Vec<Vec<f64>>>,
}

/// Parses TOML or JSON. JSON is tried first for `.json` files and for
/// text starting with `{`.
pub fn parse_config(text: &str, path: Option<&Path>) -> Result<RunConfig, CliError> {
    let json_first =
        path.and_then(|p| p.extension()).is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    let value: Value = if json_first {
        serde_json::from_str(text).map_err(|e| CliError::config("", format!("invalid JSON: {e}")))?
    } else {
        toml::from_str(text).map_err(|e| CliError::config("", format!("invalid TOML: {}", e.message())))?
    };
    let config: RunConfig = serde_path_to_error::deserialize(value.clone()).map_err(|e| {
        let mut path = e.path().to_string();
        let message = e.inner().to_string();
        if message.starts_with("unknown variant") {
            path = tag_path(&value, &path);
        }
        CliError::config(&path, message)
    })?;
    config.validate()?;
    Ok(config)
}

/// Appends the tag key (`family` or `kind`) of the object at `path`.
fn tag_path(root: &Value, path: &str) -> String {
    let mut node = Some(root);
    for seg in path.split('.').filter(|s| !s.is_empty() && *s != "?") {
        let (key, index) = match seg.find('[') {
            Some(i) => (&seg[..i], seg[i + 1..seg.len() - 1].parse::<usize>().ok()),
            None => (seg, None),
        };
        node = node.and_then(|n| if key.is_empty() { Some(n) } else { n.get(key) });
        if let Some(i) = index {
            node = node.and_then(|n| n.get(i));
        }
    }
    match node {
        Some(n) if n.get("family").is_some() => format!("{path}.family"),
        Some(n) if n.get("kind").is_some() => format!("{path}.kind"),
        _ => path.to_string(),
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        let d = self.dim;
        for (i, h) in self.hamiltonians.iter().enumerate() {
            h.build(d).map_err(|e| CliError::config(&format!("hamiltonians[{i}]"), e.to_string()))?;
        }
        if let Some(j) = &self.junction {
            if !self.hamiltonians.is_empty() {
                j.build(d, &self.build_hamiltonians()?).map_err(|e| CliError::config("junction", e.to_string()))?;
            }
        }
        if let Some(g) = &self.grid {
            if g.tangential.len() != d {
                return Err(CliError::config(
                    "grid.tangential",
                    format!("{} axes for tangential dimension {d}", g.tangential.len()),
                ));
            }
            JunctionGrid::build(&g.config(self.hamiltonians.len().max(1)))
                .map_err(|e| CliError::config("grid", e.to_string()))?;
        }
        if let Some(init) = &self.initial {
            init.validate(d, self.hamiltonians.len())?;
        }
        if let Some(t) = &self.time {
            if !(t.final_time >= 0.0 && t.final_time.is_finite()) {
                return Err(CliError::config(
                    "time.final_time",
                    format!("must be finite and >= 0, got {}", t.final_time),
                ));
            }
            for (k, &s) in t.snapshots.iter().enumerate() {
                if !(s > 0.0 && s <= t.final_time) {
                    return Err(CliError::config(
                        &format!("time.snapshots[{k}]"),
                        format!("snapshot time {s} lies outside (0, {}]", t.final_time),
                    ));
                }
            }
            if let Some(c) = t.cfl {
                if !(c > 0.0 && c <= 1.0) {
                    return Err(CliError::config("time.cfl", format!("must lie in (0, 1], got {c}")));
                }
            }
            if let Some(m) = t.dt_max {
                if !(m > 0.0) {
                    return Err(CliError::config("time.dt_max", format!("must be positive, got {m}")));
                }
            }
        }
        if let Some(r) = &self.limiter {
            r.validate("limiter", d)?;
        }
        if let Some(v) = &self.vtf {
            for (k, p) in v.pairs.iter().enumerate() {
                for (name, pt) in [("x", &p.x), ("y", &p.y)] {
                    pt.validate(&format!("vtf.pairs[{k}].{name}"), d, self.hamiltonians.len())?;
                }
            }
            if !(v.radius > 0.0) {
                return Err(CliError::config("vtf.radius", "must be positive"));
            }
        }
        if let Some(i) = &self.ishii {
            i.left.build(d).map_err(|e| CliError::config("ishii.left", e.to_string()))?;
            i.right.build(d).map_err(|e| CliError::config("ishii.right", e.to_string()))?;
            i.p_prime.validate("ishii.p_prime", d)?;
        }
        if let Some(o) = &self.oracle {
            if let Some(h) = &o.hamiltonian {
                h.build(d).map_err(|e| CliError::config("oracle.hamiltonian", e.to_string()))?;
            }
            if let Some(t) = o.t {
                if !(t >= 0.0) {
                    return Err(CliError::config("oracle.t", format!("must be >= 0, got {t}")));
                }
            }
            for (k, p) in o.points.iter().flatten().enumerate() {
                if p.len() != d + 1 {
                    return Err(CliError::config(
                        &format!("oracle.points[{k}]"),
                        format!("expected {} coordinates", d + 1),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn build_hamiltonians(&self) -> Result<Vec<Arc<dyn Hamiltonian>>, CliError> {
        self.hamiltonians
            .iter()
            .enumerate()
            .map(|(i, h)| h.build(self.dim).map_err(|e| CliError::config(&format!("hamiltonians[{i}]"), e.to_string())))
            .collect()
    }

    pub fn require_hamiltonians(&self) -> Result<Vec<Arc<dyn Hamiltonian>>, CliError> {
        if self.hamiltonians.is_empty() {
            return Err(CliError::config("hamiltonians", "at least one branch Hamiltonian is required"));
        }
        self.build_hamiltonians()
    }

    pub fn junction_spec(&self) -> JunctionSpec {
        self.junction.clone().unwrap_or(JunctionSpec::FluxLimited { limiter: LimiterSpec::A0 })
    }

    pub fn junction_function(&self, hs: &[Arc<dyn Hamiltonian>]) -> Result<Arc<dyn JunctionFunction>, CliError> {
        self.junction_spec().build(self.dim, hs).map_err(|e| CliError::config("junction", e.to_string()))
    }

    /// The limiter of a flux-limited junction condition.
    pub fn limiter(&self, hs: &[Arc<dyn Hamiltonian>]) -> Result<Option<Arc<dyn FluxLimiter>>, CliError> {
        match self.junction_spec() {
            JunctionSpec::FluxLimited { limiter } => {
                limiter.build(self.dim, hs).map(Some).map_err(|e| CliError::config("junction.limiter", e.to_string()))
            }
            JunctionSpec::Linear { .. } => Ok(None),
        }
    }

    pub fn require_grid(&self) -> Result<&GridSpec, CliError> {
        self.grid.as_ref().ok_or_else(|| CliError::config("grid", "missing section"))
    }

    pub fn require_initial(&self) -> Result<&InitialSpec, CliError> {
        self.initial.as_ref().ok_or_else(|| CliError::config("initial", "missing section"))
    }

    pub fn require_time(&self) -> Result<&TimeSpec, CliError> {
        self.time.as_ref().ok_or_else(|| CliError::config("time", "missing section"))
    }
}

impl GridSpec {
    pub fn config(&self, branches: usize) -> GridConfig {
        GridConfig {
            branches,
            tangential: self.tangential.clone(),
            normal_extent: self.normal_extent,
            normal_spacing: self.normal_spacing,
        }
    }
}

fn check_len(path: &str, v: &[f64], expected: usize, allow_empty: bool) -> Result<(), CliError> {
    if v.len() == expected || (allow_empty && v.is_empty()) {
        Ok(())
    } else {
        Err(CliError::config(path, format!("expected {expected} components, got {}", v.len())))
    }
}

impl InitialSpec {
    fn validate(&self, d: usize, branches: usize) -> Result<(), CliError> {
        match self {
            InitialSpec::Cone { center, .. } => check_len("initial.center", center, d, true),
            InitialSpec::Affine { tangential, slopes, .. } => {
                check_len("initial.tangential", tangential, d, true)?;
                check_len("initial.slopes", slopes, branches.max(1), false)
            }
            InitialSpec::Bump { radius, center, .. } => {
                if !(*radius > 0.0) {
                    return Err(CliError::config("initial.radius", "must be positive"));
                }
                check_len("initial.center", center, d, true)
            }
            InitialSpec::Table { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::config("initial.values", "values must be finite"));
                }
                Ok(())
            }
        }
    }

    /// Value at `(x', x)` on branch `branch`, for the closed-form kinds.
    pub fn eval(&self, branch: usize, xt: &[f64], x: f64) -> Option<f64> {
        let radius = |center: &[f64]| {
            let t: f64 = xt.iter().enumerate().map(|(k, v)| (v - center.get(k).copied().unwrap_or(0.0)).powi(2)).sum();
            (t + x * x).sqrt()
        };
        match self {
            InitialSpec::Cone { cap, center } => Some(radius(center).min(*cap)),
            InitialSpec::Affine { constant, tangential, slopes } => {
                let t: f64 = xt.iter().zip(tangential).map(|(a, b)| a * b).sum();
                Some(constant + t + slopes.get(branch).copied().unwrap_or(0.0) * x)
            }
            InitialSpec::Bump { height, radius: r, center } => {
                let s = (1.0 - (radius(center) / r).powi(2)).max(0.0);
                Some(height * s * s)
            }
            InitialSpec::Table { .. } => None,
        }
    }
}

impl ReduceSpec {
    fn validate(&self, path: &str, d: usize) -> Result<(), CliError> {
        if let Some(points) = &self.points {
            for (k, p) in points.iter().enumerate() {
                check_len(&format!("{path}.points[{k}]"), p, d, false)?;
            }
        } else {
            if self.count == 0 {
                return Err(CliError::config(&format!("{path}.count"), "must be positive"));
            }
            if !(self.max >= self.min) {
                return Err(CliError::config(&format!("{path}.max"), "must be >= min"));
            }
        }
        Ok(())
    }

    /// Sample points; a single empty point when `d = 0`.
    pub fn points(&self, d: usize) -> Vec<Vec<f64>> {
        if let Some(p) = &self.points {
            return p.clone();
        }
        let axis: Vec<f64> = if self.count == 1 {
            vec![self.min]
        } else {
            (0..self.count).map(|k| self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64).collect()
        };
        let mut out = vec![Vec::new()];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

impl PointSpec {
    fn validate(&self, path: &str, d: usize, branches: usize) -> Result<(), CliError> {
        check_len(&format!("{path}.tangential"), &self.tangential, d, true)?;
        if self.branch > branches {
            return Err(CliError::config(&format!("{path}.branch"), format!("branch {} of {branches}", self.branch)));
        }
        if !(self.normal >= 0.0) {
            return Err(CliError::config(&format!("{path}.normal"), "must be >= 0"));
        }
        Ok(())
    }
}
