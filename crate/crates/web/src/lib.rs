//! Browser bindings for the demo page in `www/`.
//!
//! Every exported function has a plain Rust twin (same name without the
//! `js_` prefix) so the numerics can be tested natively.

use std::sync::Arc;

use serde_json::json;
use wasm_bindgen::prelude::*;

use jhj_core::condition::{a0, reduce_to_limiter, ConstantLimiter, LinearJunction};
use jhj_core::hamiltonian::{Hamiltonian, Quadratic};
use jhj_core::ishii::{extremal_solutions, ishii_limiters, TwoDomainProblem};
use jhj_core::junction::{EuclideanField, EuclideanGrid, Field, GridConfig, JunctionGrid};
use jhj_core::solver::{solve, Problem};

fn quadratic(b: f64, c: f64) -> Arc<dyn Hamiltonian> {
    Arc::new(Quadratic::new(vec![0.0], b, c))
}

/// `[p', A_0(p'), A_F(p')]` rows, flattened, for `F = c - w1 p_1 - w2 p_2` on
/// the branches `|p'|^2 + (p + b_i)^2`.
#[allow(clippy::too_many_arguments)]
pub fn effective_limiter(
    c: f64,
    w1: f64,
    w2: f64,
    b1: f64,
    b2: f64,
    p_min: f64,
    p_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    if n < 2 || p_max.is_nan() || p_min.is_nan() || p_max <= p_min {
        return Err("need n >= 2 and p_max > p_min".into());
    }
    if w1 < 0.0 || w2 < 0.0 {
        return Err("weights must be >= 0".into());
    }
    let hs = vec![quadratic(b1, 0.0), quadratic(b2, 0.0)];
    let f = LinearJunction::new(1, c, vec![w1, w2]);
    let mut out = Vec::with_capacity(3 * n);
    for k in 0..n {
        let p = p_min + (p_max - p_min) * k as f64 / (n - 1) as f64;
        out.push(p);
        out.push(a0(&hs, &[p]).map_err(|e| e.to_string())?);
        out.push(reduce_to_limiter(&f, &hs, &[p]).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Solution at `final_time` on a star of half-lines with `(p + b_i)^2`, a
/// constant limiter and `u_0 = min(x, 1)`. Returns `branches` rows of
/// `layers + 1` values, interface first.
pub fn star_profile(b: &[f64], limiter: f64, final_time: f64, extent: f64, spacing: f64) -> Result<Vec<f64>, String> {
    if b.is_empty() {
        return Err("at least one branch".into());
    }
    let grid = JunctionGrid::build(&GridConfig {
        branches: b.len(),
        tangential: vec![],
        normal_extent: extent,
        normal_spacing: spacing,
    })
    .map_err(|e| e.to_string())?;
    let grid = Arc::new(grid);
    let hs: Vec<Arc<dyn Hamiltonian>> =
        b.iter().map(|&bi| Arc::new(Quadratic::new(vec![], bi, 0.0)) as Arc<dyn Hamiltonian>).collect();
    let u0 = Field::from_fn(grid.clone(), |x| x.normal.min(1.0));
    let problem =
        Problem::new(hs, Arc::new(ConstantLimiter::new(0, limiter)), u0, final_time).map_err(|e| e.to_string())?;
    let last = solve(&problem).map_err(|e| e.to_string())?.last().clone();
    let layers = grid.normal_layers();
    let mut out = Vec::with_capacity(b.len() * (layers + 1));
    for branch in 0..b.len() {
        for k in 0..=layers {
            out.push(last.at(branch, k, 0));
        }
    }
    Ok(out)
}

/// Two half-lines with `(p + b)^2 + c`, `u_0 = min(|x|, 1)`: the Ishii
/// limiters at `p' = 0` and the minimal and maximal solutions at
/// `final_time`, as JSON.
pub fn ishii_profiles(bl: f64, cl: f64, br: f64, cr: f64, final_time: f64) -> Result<String, String> {
    let (left, right): (Arc<dyn Hamiltonian>, Arc<dyn Hamiltonian>) =
        (Arc::new(Quadratic::new(vec![], bl, cl)), Arc::new(Quadratic::new(vec![], br, cr)));
    let limiters = ishii_limiters(&left, &right, &[]).map_err(|e| e.to_string())?;
    let grid = EuclideanGrid::build(&GridConfig {
        branches: 2,
        tangential: vec![],
        normal_extent: 2.0,
        normal_spacing: 0.025,
    })
    .map_err(|e| e.to_string())?;
    let grid = Arc::new(grid);
    let u0 = EuclideanField::from_fn(grid.clone(), |_, x| x.abs().min(1.0));
    let sols = extremal_solutions(&TwoDomainProblem::new(left, right, u0, final_time)).map_err(|e| e.to_string())?;
    let x: Vec<f64> = (0..grid.node_count()).map(|i| grid.coords(i).1).collect();
    Ok(json!({
        "a0": limiters.a0,
        "a_star": limiters.a_star,
        "a_minus": limiters.minus,
        "a_plus": limiters.plus,
        "x": x,
        "minimal": sols.minimal.fields.last().map(|f| f.values.clone()),
        "maximal": sols.maximal.fields.last().map(|f| f.values.clone()),
    })
    .to_string())
}

#[wasm_bindgen(js_name = effectiveLimiter)]
#[allow(clippy::too_many_arguments)]
pub fn js_effective_limiter(
    c: f64,
    w1: f64,
    w2: f64,
    b1: f64,
    b2: f64,
    p_min: f64,
    p_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsValue> {
    effective_limiter(c, w1, w2, b1, b2, p_min, p_max, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = starProfile)]
pub fn js_star_profile(
    b: Vec<f64>,
    limiter: f64,
    final_time: f64,
    extent: f64,
    spacing: f64,
) -> Result<Vec<f64>, JsValue> {
    star_profile(&b, limiter, final_time, extent, spacing).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = ishiiProfiles)]
pub fn js_ishii_profiles(bl: f64, cl: f64, br: f64, cr: f64, final_time: f64) -> Result<String, JsValue> {
    ishii_profiles(bl, cl, br, cr, final_time).map_err(|e| JsValue::from_str(&e))
}
