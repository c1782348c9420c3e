//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.
//! A non-flag command-line argument restricts the run to criteria whose
//! name contains it.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jhj_core::condition::{
    a0, check_quasiconvex, reduce_to_limiter, ConstantLimiter, FluxLimitedFunction, FluxLimiter, FnJunction, FnLimiter,
    LinearJunction, QuadraticLimiter,
};
use jhj_core::hamiltonian::{
    branch_min, envelope, pi0, pi_pm, Anisotropic, FnHamiltonian, Hamiltonian, Quadratic, Side,
};
use jhj_core::ishii::{extremal_solutions, fold, ishii_limiters, mirrored_hamiltonians, unfold, TwoDomainProblem};
use jhj_core::junction::{AxisConfig, EuclideanField, EuclideanGrid, Field, GridConfig, JunctionGrid, JunctionPoint};
use jhj_core::solver::{
    coefficients, discrete_comparison, solve, solve_euclidean, solve_lockstep, EuclideanProblem, HopfLax, Problem,
    StepCoefficients,
};
use jhj_core::vertex::{Momentum, VertexTestFunction};

type Hs = Vec<Arc<dyn Hamiltonian>>;

struct Check {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Check {
    Check { passed, detail }
}

type Criterion = (usize, &'static str, fn() -> Result<Check, String>);

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 9] = [
        (1, "pi_inversion", c1_pi_inversion),
        (2, "envelope_identity", c2_envelope_identity),
        (3, "limiter_reduction", c3_limiter_reduction),
        (4, "vertex_test_function", c4_vertex_test_function),
        (5, "solver_vs_hopf_lax", c5_solver_vs_hopf_lax),
        (6, "discrete_comparison", c6_discrete_comparison),
        (7, "limiter_monotonicity", c7_limiter_monotonicity),
        (8, "ishii_identification", c8_ishii_identification),
        (9, "junction_euclidean_consistency", c9_junction_euclidean),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| check(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id} {name}: {} [{secs:.2}s]", outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rvec(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-r..r)).collect()
}

/// Random member of the quadratic or anisotropic family, half of the time
/// hidden behind a closure so that the numerical paths run too.
fn random_family(rng: &mut ChaCha8Rng, d: usize) -> (Arc<dyn Hamiltonian>, &'static str) {
    let (h, name): (Arc<dyn Hamiltonian>, &str) = if rng.gen_bool(0.5) {
        (Arc::new(Quadratic::new(rvec(rng, d, 2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0))), "quadratic")
    } else {
        let a = Anisotropic::new(
            rng.gen_range(0.2..3.0),
            rng.gen_range(0.2..3.0),
            rvec(rng, d, 2.0),
            rng.gen_range(-2.0..2.0),
        )
        .expect("positive coefficients");
        (Arc::new(a), "anisotropic")
    };
    if rng.gen_bool(0.5) {
        let inner = h.clone();
        (Arc::new(FnHamiltonian::new(d, h.class(), move |pt, p| inner.eval(pt, p))), name)
    } else {
        (h, name)
    }
}

fn c1_pi_inversion() -> Result<Check, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let start = Instant::now();
    let (mut worst, mut order_fail) = (0.0f64, 0);
    for _ in 0..10_000 {
        let d = rng.gen_range(0..3);
        let (h, _) = random_family(&mut rng, d);
        let pt = rvec(&mut rng, d, 3.0);
        let a = branch_min(&h, &pt).map_err(err)?;
        let extra = if rng.gen_bool(0.1) { 0.0 } else { 10f64.powf(rng.gen_range(-6.0..1.5)) };
        let level = a + 1e-6 + extra;
        let lo = pi_pm(&h, &pt, level, Side::Minus).map_err(err)?;
        let hi = pi_pm(&h, &pt, level, Side::Plus).map_err(err)?;
        let mid = pi0(&h, &pt).map_err(err)?;
        worst = worst.max((h.eval(&pt, lo) - level).abs()).max((h.eval(&pt, hi) - level).abs());
        if !(lo <= mid && mid <= hi) {
            order_fail += 1;
        }
    }
    let elapsed = start.elapsed();
    Ok(check(
        worst <= 1e-9 && order_fail == 0 && elapsed < Duration::from_secs(10),
        format!(
            "max |H(pi) - l| = {worst:.2e} (<= 1e-9), order violations {order_fail}, {:.2}s (< 10s)",
            elapsed.as_secs_f64()
        ),
    ))
}

fn c2_envelope_identity() -> Result<Check, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (mut max_err, mut min_err) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let d = rng.gen_range(0..3);
        let (h, _) = random_family(&mut rng, d);
        let pt = rvec(&mut rng, d, 3.0);
        let p = rng.gen_range(-5.0..5.0);
        let lo = envelope(&h, &pt, p, Side::Minus).map_err(err)?;
        let hi = envelope(&h, &pt, p, Side::Plus).map_err(err)?;
        let a = branch_min(&h, &pt).map_err(err)?;
        max_err = max_err.max((lo.max(hi) - h.eval(&pt, p)).abs());
        min_err = min_err.max((lo.min(hi) - a).abs());
    }
    Ok(check(
        max_err <= 1e-10 && min_err <= 1e-10,
        format!("|max(H-,H+) - H| <= {max_err:.2e}, |min(H-,H+) - A_i| <= {min_err:.2e} (tol 1e-10)"),
    ))
}

fn scalar_bisection(mut g: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if g(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

fn c3_limiter_reduction() -> Result<Check, String> {
    // F = 2 - (p_1 + p_2) with H_i = p^2: 2 - 2 sqrt(l) = l
    let hs: Hs = vec![Arc::new(Quadratic::standard(0)), Arc::new(Quadratic::standard(0))];
    let f = LinearJunction::new(0, 2.0, vec![1.0, 1.0]);
    let af = reduce_to_limiter(&f, &hs, &[]).map_err(err)?;
    let oracle = scalar_bisection(|l| 2.0 - 2.0 * l.sqrt() - l, 0.0, 2.0);
    let closed = (3f64.sqrt() - 1.0).powi(2);
    let example_err = (af - oracle).abs().max((af - closed).abs());

    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut idem_err, mut below_a0) = (0.0f64, 0usize);
    for _ in 0..1000 {
        let d = rng.gen_range(0..3);
        let n = rng.gen_range(1..4);
        let hs: Hs = (0..n).map(|_| random_family(&mut rng, d).0).collect();
        let limiter: Arc<dyn FluxLimiter> = if rng.gen_bool(0.3) {
            Arc::new(ConstantLimiter::new(d, rng.gen_range(-1.0..3.0)))
        } else {
            Arc::new(QuadraticLimiter::new(rng.gen_range(-1.0..3.0), rng.gen_range(0.0..2.0), rvec(&mut rng, d, 1.0)))
        };
        let pt = rvec(&mut rng, d, 2.0);
        let fa = FluxLimitedFunction::new(limiter.clone(), hs.clone());
        let base = a0(&hs, &pt).map_err(err)?;
        let reduced = reduce_to_limiter(&fa, &hs, &pt).map_err(err)?;
        idem_err = idem_err.max((reduced - limiter.eval(&pt).max(base)).abs());
        if reduced < base {
            below_a0 += 1;
        }
        let lin = LinearJunction::new(d, rng.gen_range(-2.0..4.0), (0..n).map(|_| rng.gen_range(0.0..2.0)).collect());
        if reduce_to_limiter(&lin, &hs, &pt).map_err(err)? < base {
            below_a0 += 1;
        }
    }

    // quasi-convex F of (p', p) with convex branches
    let hs: Hs = vec![
        Arc::new(Quadratic::new(vec![0.0, 0.0], 0.0, 0.0)),
        Arc::new(Anisotropic::new(2.0, 1.0, vec![0.5, -0.3], 0.4).map_err(err)?),
        Arc::new(Quadratic::new(vec![0.2, -0.1], -0.5, 0.3)),
    ];
    let f = FnJunction::new(2, 3, true, |pt, p| {
        1.0 + pt[0] * pt[0] + 0.5 * pt[1] * pt[1] + pt[0] - p[0] - 2.0 * p[1] - 0.5 * p[2]
    });
    let mut qc_below = 0;
    let report = check_quasiconvex(
        |pt| {
            let v = reduce_to_limiter(&f, &hs, pt).unwrap_or(f64::NAN);
            if v < a0(&hs, pt).unwrap_or(f64::NAN) {
                qc_below += 1;
            }
            v
        },
        &[(-2.0, 2.0), (-2.0, 2.0)],
        1000,
        1e-9,
        304,
    );
    let passed = example_err <= 1e-6 && idem_err <= 1e-8 && below_a0 == 0 && qc_below == 0 && report.passed();
    Ok(check(
        passed,
        format!(
            "A_F = {af:.12} vs oracle {oracle:.12} (err {example_err:.1e}, tol 1e-6); idempotence err {idem_err:.1e} (tol 1e-8); \
             A_F < A_0 in {} samples; quasi-convexity {}/{} segments ok, worst excess {:.1e}",
            below_a0 + qc_below,
            report.segments - report.violations.len(),
            report.segments,
            report.worst_excess
        ),
    ))
}

fn momentum_vec(m: &Momentum) -> Vec<f64> {
    match m {
        Momentum::Branch { p_tan, p, .. } => p_tan.iter().copied().chain([*p]).collect(),
        Momentum::Interface { p_tan, slopes } => p_tan.iter().chain(slopes).copied().collect(),
    }
}

/// Finite-difference gradient of `point -> g(point)`: central differences in
/// the tangential and branch-normal directions, second-order one-sided
/// differences into each branch at interface points.
fn fd_gradient(
    g: &dyn Fn(&JunctionPoint) -> Result<f64, String>,
    x: &JunctionPoint,
    branches: usize,
) -> Result<Vec<f64>, String> {
    let h = 1e-5;
    let mut out = Vec::new();
    for k in 0..x.tangential.len() {
        let mut a = x.clone();
        let mut b = x.clone();
        a.tangential[k] += h;
        b.tangential[k] -= h;
        out.push((g(&a)? - g(&b)?) / (2.0 * h));
    }
    if x.on_interface() {
        let h = 1e-4;
        let g0 = g(x)?;
        for k in 0..branches {
            let g1 = g(&JunctionPoint::new(k, x.tangential.clone(), h))?;
            let g2 = g(&JunctionPoint::new(k, x.tangential.clone(), 2.0 * h))?;
            out.push((-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * h));
        }
    } else {
        let a = JunctionPoint::new(x.branch, x.tangential.clone(), x.normal + h);
        let b = JunctionPoint::new(x.branch, x.tangential.clone(), x.normal - h);
        out.push((g(&a)? - g(&b)?) / (2.0 * h));
    }
    Ok(out)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, d: usize, min_normal: f64, max_normal: f64) -> JunctionPoint {
    JunctionPoint::new(rng.gen_range(0..n), rvec(rng, d, 2.0), rng.gen_range(min_normal..max_normal))
}

fn c4_vertex_test_function() -> Result<Check, String> {
    let start = Instant::now();
    let hs: Hs = vec![
        Arc::new(Quadratic::standard(1)),
        Arc::new(Anisotropic::new(2.0, 1.0, vec![0.0], 0.5).map_err(err)?),
        Arc::new(Quadratic::new(vec![0.0], -0.3, 0.0)),
    ];
    let n = hs.len();
    let vtf = VertexTestFunction::new(hs, Arc::new(QuadraticLimiter::new(0.2, 2.5, vec![0.0]))).map_err(err)?;
    if !vtf.a0_violations(1000, 5.0, 400).map_err(err)?.is_empty() {
        return Ok(check(false, "limiter below A_0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(404);

    // gradients and residuals on admissible pairs
    let (mut worst_rel, mut worst_res, mut worst_eq) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    for k in 0..500 {
        let (x, y) = loop {
            let mut x = random_point(&mut rng, n, 1, 0.05, 3.0);
            let mut y = random_point(&mut rng, n, 1, 0.05, 3.0);
            if k >= 400 {
                if rng.gen_bool(0.5) {
                    x = JunctionPoint::interface(x.tangential);
                } else {
                    y = JunctionPoint::interface(y.tangential);
                }
            }
            let same = x.branch == y.branch || x.on_interface() || y.on_interface();
            if !same || (x.normal - y.normal).abs() >= 0.1 {
                break (x, y);
            }
        };
        let ev = vtf.eval(&x, &y).map_err(err)?;
        let (dx, dy) = vtf.gradient_from(&x, &y, &ev).map_err(err)?;
        let fx = fd_gradient(&|p| vtf.eval(p, &y).map(|e| e.value).map_err(err), &x, n)?;
        let fy = fd_gradient(&|p| vtf.eval(&x, p).map(|e| e.value).map_err(err), &y, n)?;
        let analytic: Vec<f64> = momentum_vec(&dx).into_iter().chain(momentum_vec(&dy)).collect();
        let fd: Vec<f64> = fx.into_iter().chain(fy).collect();
        let scale = analytic.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let diff = analytic.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst_rel = worst_rel.max(diff / scale);
        let res = vtf.hamiltonian_at(&dy.negated()).map_err(err)? - vtf.hamiltonian_at(&dx).map_err(err)?;
        worst_res = worst_res.max(res);
        if !x.on_interface() && !y.on_interface() && x.branch != y.branch {
            worst_eq = worst_eq.max(res.abs());
        }
    }

    let origin = JunctionPoint::interface(vec![0.0]);
    let g00 = vtf.eval(&origin, &origin).map_err(err)?.value;
    let mut diag = 0.0f64;
    for k in 0..200 {
        let x = if k % 10 == 0 {
            JunctionPoint::interface(rvec(&mut rng, 1, 5.0))
        } else {
            JunctionPoint::new(rng.gen_range(0..n), rvec(&mut rng, 1, 5.0), rng.gen_range(0.0..5.0))
        };
        diag = diag.max((vtf.eval(&x, &x).map_err(err)?.value - g00).abs());
    }
    let mut lower = f64::INFINITY;
    for k in 0..1000 {
        let mut x = random_point(&mut rng, n, 1, 0.0, 5.0);
        let mut y = random_point(&mut rng, n, 1, 0.0, 5.0);
        if k % 10 == 0 {
            x = JunctionPoint::interface(x.tangential);
        }
        if k % 10 == 5 {
            y = JunctionPoint::interface(y.tangential);
        }
        lower = lower.min(vtf.eval(&x, &y).map_err(err)?.value - g00);
    }

    let quad: Hs = (0..3).map(|_| Arc::new(Quadratic::standard(1)) as _).collect();
    let qvtf = VertexTestFunction::new(quad, Arc::new(QuadraticLimiter::new(0.5, 1.0, vec![0.0]))).map_err(err)?;
    let table = qvtf.superlinearity_probe(&[8.0, 16.0, 32.0, 64.0], 100, 405).map_err(err)?;
    let ratios: Vec<f64> = table.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let elapsed = start.elapsed();

    let passed = worst_rel <= 1e-4
        && worst_res <= 1e-6
        && worst_eq <= 1e-6
        && diag <= 1e-8
        && lower >= -1e-8
        && ratios.iter().all(|&r| r >= 1.8)
        && elapsed < Duration::from_secs(120);
    let table_text: Vec<String> = table.iter().map(|(r, g)| format!("g({r})={g:.3}")).collect();
    let ratio_text: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok(check(
        passed,
        format!(
            "gradient rel err {worst_rel:.1e} (<= 1e-4); residual max {worst_res:.1e}, |i != j| {worst_eq:.1e} (<= 1e-6); \
             diagonal {diag:.1e} (<= 1e-8); min G - G(0,0) = {lower:.3e} (>= -1e-8); {} ratios [{}] (>= 1.8); {:.1}s (< 120s)",
            table_text.join(" "),
            ratio_text.join(", "),
            elapsed.as_secs_f64()
        ),
    ))
}

fn junction_grid(
    branches: usize,
    tangential: Vec<AxisConfig>,
    extent: f64,
    dx: f64,
) -> Result<Arc<JunctionGrid>, String> {
    JunctionGrid::build(&GridConfig { branches, tangential, normal_extent: extent, normal_spacing: dx })
        .map(Arc::new)
        .map_err(err)
}

fn signed_normal(branch: usize, normal: f64) -> f64 {
    if branch == 0 {
        -normal
    } else {
        normal
    }
}

fn c5_solver_vs_hopf_lax() -> Result<Check, String> {
    let start = Instant::now();
    let q: Arc<dyn Hamiltonian> = Arc::new(Quadratic::standard(0));
    let oracle = HopfLax::new(1, |z: &[f64]| Ok(z[0] * z[0] / 4.0));
    let u0 = |y: &[f64]| y[0].abs().min(1.0);
    let t = 0.5;
    let mut errors = Vec::new();
    for m in [40.0, 80.0, 160.0] {
        let g = junction_grid(2, vec![], 4.0, 1.0 / m)?;
        let hs = mirrored_hamiltonians(q.clone(), q.clone());
        let limiter = Arc::new(FnLimiter::branch_maximum(hs.clone()));
        let init = Field::from_fn(g.clone(), |x| x.normal.min(1.0));
        let traj = solve(&Problem::new(hs, limiter, init, t).map_err(err)?).map_err(err)?;
        let last = traj.last();
        let mut e = 0.0f64;
        for i in 0..g.node_count() {
            let p = g.point(i);
            let exact = oracle.value(u0, t, &[signed_normal(p.branch, p.normal)]).map_err(err)?;
            e = e.max((last.values[i] - exact).abs());
        }
        errors.push(e);
    }
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    let elapsed = start.elapsed();
    Ok(check(
        errors[0] <= 0.15 && ratios.iter().all(|&r| r >= 1.3) && elapsed < Duration::from_secs(60),
        format!(
            "L-inf errors {:.4e} / {:.4e} / {:.4e} at dx = 1/40, 1/80, 1/160 (first <= 0.15); ratios {:.3}, {:.3} (>= 1.3); {:.1}s (< 60s)",
            errors[0],
            errors[1],
            errors[2],
            ratios[0],
            ratios[1],
            elapsed.as_secs_f64()
        ),
    ))
}

fn c6_discrete_comparison() -> Result<Check, String> {
    let g = junction_grid(3, vec![AxisConfig { min: -1.0, max: 1.0, spacing: 0.1 }], 1.0, 0.1)?;
    let hs: Hs = vec![
        Arc::new(Quadratic::standard(1)),
        Arc::new(Anisotropic::new(1.5, 0.7, vec![0.3], -0.4).map_err(err)?),
        Arc::new(Quadratic::new(vec![0.2], 0.5, 0.1)),
    ];
    let base = Field::constant(g.clone(), 0.0);
    let problem = Problem::new(hs, Arc::new(QuadraticLimiter::new(0.6, 1.0, vec![0.0])), base, 0.25).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut worst, mut steps) = (0.0f64, 0);
    for k in 0..100 {
        let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0));
        let slopes: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let mut u0 = Field::from_fn(g.clone(), |x| {
            a * x.tangential[0] + b * (x.tangential[0] * 2.0).sin() + c * x.normal.min(0.5) * slopes[x.branch]
        });
        for v in u0.values.iter_mut() {
            *v += rng.gen_range(-0.03..0.03);
        }
        let mut v0 = u0.clone();
        match k % 3 {
            0 => v0.values.iter_mut().for_each(|v| *v += rng.gen_range(0.0..0.5)),
            1 => v0.values.iter_mut().for_each(|v| *v += rng.gen_range(0.0..0.1)),
            _ => v0.values.iter_mut().for_each(|v| {
                if rng.gen_bool(0.5) {
                    *v += rng.gen_range(0.0..0.2)
                }
            }),
        }
        let r = discrete_comparison(&problem, &u0, &v0).map_err(err)?;
        worst = worst.max(r.max_violation);
        steps += r.steps;
    }
    Ok(check(worst <= 1e-12, format!("max (u - v)_+ = {worst:.1e} over 100 pairs, {steps} steps (<= 1e-12)")))
}

fn c7_limiter_monotonicity() -> Result<Check, String> {
    let g = junction_grid(3, vec![AxisConfig { min: -1.0, max: 1.0, spacing: 0.1 }], 1.5, 0.1)?;
    let hs: Hs = (0..3).map(|_| Arc::new(Quadratic::standard(1)) as _).collect();
    let u0 = Field::from_fn(g.clone(), |x| {
        let s = [0.7, -0.4, 0.2][x.branch];
        (x.tangential[0] * x.tangential[0] + x.normal * x.normal).sqrt().min(1.0) + s * x.normal.min(0.5)
    });
    let snapshots = vec![0.1, 0.2, 0.3];
    let low = Problem::new(hs.clone(), Arc::new(ConstantLimiter::new(1, 0.0)), u0.clone(), 0.4)
        .and_then(|p| p.with_snapshots(snapshots.clone()))
        .map_err(err)?;
    let high = Problem::new(hs, Arc::new(ConstantLimiter::new(1, 1.0)), u0, 0.4)
        .and_then(|p| p.with_snapshots(snapshots))
        .map_err(err)?;
    let runs = solve_lockstep(&[low, high]).map_err(err)?;
    let (mut min_gap, mut max_gap) = (f64::INFINITY, 0.0f64);
    for (a, b) in runs[0].fields.iter().zip(&runs[1].fields) {
        for (x, y) in a.values.iter().zip(&b.values) {
            min_gap = min_gap.min(x - y);
            max_gap = max_gap.max(x - y);
        }
    }
    Ok(check(
        min_gap >= -1e-10,
        format!(
            "min (u_A - u_A') = {min_gap:.1e} over {} snapshots (>= -1e-10); largest gap {max_gap:.3e}",
            runs[0].fields.len()
        ),
    ))
}

fn euclidean_grid(dx: f64, dt: f64) -> Result<Arc<EuclideanGrid>, String> {
    EuclideanGrid::build(&GridConfig {
        branches: 2,
        tangential: vec![AxisConfig { min: -1.0, max: 1.0, spacing: dt }],
        normal_extent: 1.5,
        normal_spacing: dx,
    })
    .map(Arc::new)
    .map_err(err)
}

fn two_domain_data(xt: &[f64], x: f64) -> f64 {
    (x.abs() + 0.5 * xt[0].abs()).min(1.0) + 0.3 * x
}

fn c8_ishii_identification() -> Result<Check, String> {
    let start = Instant::now();
    let shifted = |b: f64| -> Arc<dyn Hamiltonian> { Arc::new(Quadratic::new(vec![0.0], b, 0.0)) };
    // pi_R^0 = -1 < pi_L^0 = 1: coincidence
    let (hl, hr) = (shifted(1.0), shifted(-1.0));
    let (mut coincide_err, mut swapped_err, mut order_err) = (0.0f64, 0.0f64, 0usize);
    for k in 0..=40 {
        let pt = [-2.0 + 0.1 * k as f64];
        let c = ishii_limiters(&hl, &hr, &pt).map_err(err)?;
        coincide_err =
            coincide_err.max((c.minus - (1.0 + pt[0] * pt[0])).abs()).max((c.plus - (1.0 + pt[0] * pt[0])).abs());
        let s = ishii_limiters(&hr, &hl, &pt).map_err(err)?;
        swapped_err = swapped_err.max((s.minus - pt[0] * pt[0]).abs()).max((s.plus - (1.0 + pt[0] * pt[0])).abs());
        for l in [c, s] {
            if !(l.a0 <= l.minus && l.minus <= l.plus) {
                order_err += 1;
            }
        }
    }

    let horizon = 0.3;
    let run = |left: &Arc<dyn Hamiltonian>, right: &Arc<dyn Hamiltonian>, h: f64| -> Result<_, String> {
        let grid = euclidean_grid(h, h)?;
        let u0 = EuclideanField::from_fn(grid, two_domain_data);
        let mut p = TwoDomainProblem::new(left.clone(), right.clone(), u0, horizon);
        p.settings.snapshots = vec![0.1, 0.2];
        extremal_solutions(&p).map_err(err)
    };
    let coarse = run(&hl, &hr, 0.1)?;
    let fine = run(&hl, &hr, 0.05)?;
    let mut gap = 0.0f64;
    for (a, b) in coarse.minimal.fields.iter().zip(&coarse.maximal.fields) {
        for (x, y) in a.values.iter().zip(&b.values) {
            gap = gap.max((x - y).abs());
        }
    }
    // scheme error estimated by the difference to the refined run
    let (cl, fl) = (coarse.minimal.fields.last().unwrap(), fine.minimal.fields.last().unwrap());
    let mut scheme_err = 0.0f64;
    for i in 0..cl.grid.node_count() {
        let (k, t) = cl.grid.locate(i);
        scheme_err = scheme_err.max((cl.values[i] - fl.values[fl.grid.index(2 * k, 2 * t)]).abs());
    }

    let swapped = run(&hr, &hl, 0.1)?;
    let mut worst_order = f64::NEG_INFINITY;
    let mut spread = 0.0f64;
    for (a, b) in swapped.minimal.fields.iter().zip(&swapped.maximal.fields) {
        for (x, y) in a.values.iter().zip(&b.values) {
            worst_order = worst_order.max(x - y);
            spread = spread.max(y - x);
        }
    }
    let elapsed = start.elapsed();
    let passed = coincide_err <= 1e-8
        && swapped_err <= 1e-8
        && order_err == 0
        && gap <= 2.0 * scheme_err
        && worst_order <= 1e-10
        && elapsed < Duration::from_secs(120);
    Ok(check(
        passed,
        format!(
            "coincidence limiters err {coincide_err:.1e}, swapped err {swapped_err:.1e} (<= 1e-8); \
             extremal gap {gap:.1e} vs 2 x scheme error {:.3e}; swapped max(U- - U+) = {worst_order:.1e} (<= 1e-10), \
             largest U+ - U- {spread:.3e}; {:.1}s (< 120s)",
            2.0 * scheme_err,
            elapsed.as_secs_f64()
        ),
    ))
}

fn c9_junction_euclidean() -> Result<Check, String> {
    let q: Arc<dyn Hamiltonian> = Arc::new(Quadratic::standard(1));
    let grid = euclidean_grid(0.1, 0.1)?;
    let u0 = EuclideanField::from_fn(grid.clone(), |xt, x| {
        (x + 0.3).abs().min(1.0) + 0.5 * (x - 0.4 * xt[0]).abs().min(0.8) + 0.2 * (2.0 * xt[0]).sin()
    });
    let hs = mirrored_hamiltonians(q.clone(), q.clone());
    let limiter = Arc::new(FnLimiter::branch_maximum(hs.clone()));
    let junction = Problem::new(hs, limiter, fold(&u0), 0.4).map_err(err)?;
    let sampled = coefficients(&junction, &junction.initial).map_err(err)?;
    let (ln, alpha) = (2.0 * sampled.normal_lipschitz, 2.0 * sampled.tangential_dissipation[0]);
    let fixed = StepCoefficients {
        dt: 0.9 / (ln / 0.1 + alpha / 0.1),
        normal_lipschitz: ln,
        tangential_dissipation: vec![alpha],
    };
    let snaps = vec![0.1, 0.2, 0.3];
    let jt = solve(
        &junction.with_snapshots(snaps.clone()).and_then(|p| p.with_fixed_coefficients(fixed.clone())).map_err(err)?,
    )
    .map_err(err)?;
    let et = solve_euclidean(
        &EuclideanProblem::new(q.clone(), q, u0, 0.4)
            .and_then(|p| p.with_snapshots(snaps))
            .and_then(|p| p.with_fixed_coefficients(fixed))
            .map_err(err)?,
    )
    .map_err(err)?;
    let mut worst = 0.0f64;
    for (j, e) in jt.fields.iter().zip(&et.fields) {
        let unfolded = unfold(j).map_err(err)?;
        for (a, b) in unfolded.values.iter().zip(&e.values) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(check(
        worst <= 1e-10 && jt.steps == et.steps && jt.fields.len() == et.fields.len(),
        format!("max |unfold(u) - U| = {worst:.1e} over {} snapshots, {} steps (<= 1e-10)", jt.fields.len(), jt.steps),
    ))
}
