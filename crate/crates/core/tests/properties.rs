use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jhj_core::condition::{FluxLimiter, LinearJunction, QuadraticLimiter, ReducedLimiter};
use jhj_core::hamiltonian::{pi0, pi_pm, Anisotropic, Hamiltonian, Quadratic, Side};
use jhj_core::ishii::{extremal_solutions, ishii_limiters, TwoDomainProblem};
use jhj_core::junction::{AxisConfig, EuclideanField, EuclideanGrid, Field, GridConfig, JunctionGrid};
use jhj_core::solver::{coefficients, solve, HopfLax, Problem, StepCoefficients};

fn grid() -> Arc<JunctionGrid> {
    Arc::new(
        JunctionGrid::build(&GridConfig {
            branches: 3,
            tangential: vec![AxisConfig { min: -0.5, max: 0.5, spacing: 0.25 }],
            normal_extent: 0.75,
            normal_spacing: 0.25,
        })
        .unwrap(),
    )
}

fn branch_hamiltonians() -> Vec<Arc<dyn Hamiltonian>> {
    vec![
        Arc::new(Quadratic::standard(1)),
        Arc::new(Anisotropic::new(1.5, 0.7, vec![0.3], -0.4).unwrap()),
        Arc::new(Quadratic::new(vec![0.2], 0.5, 0.1)),
    ]
}

/// One explicit step with coefficients fixed from a reference field, so that
/// perturbed fields see the same stencil weights.
fn one_step(reference: &Field, field: &Field) -> Field {
    let p = Problem::new(
        branch_hamiltonians(),
        Arc::new(QuadraticLimiter::new(0.6, 1.0, vec![0.0])),
        reference.clone(),
        1.0,
    )
    .unwrap();
    let c = coefficients(&p, reference).unwrap();
    let fixed = StepCoefficients {
        dt: 0.5 * c.dt,
        normal_lipschitz: 2.0 * c.normal_lipschitz,
        tangential_dissipation: c.tangential_dissipation.iter().map(|a| 2.0 * a).collect(),
    };
    let mut p = p.with_initial(field.clone()).unwrap().with_fixed_coefficients(fixed.clone()).unwrap();
    p.settings.final_time = fixed.dt;
    solve(&p).unwrap().last().clone()
}

fn random_field(g: &Arc<JunctionGrid>, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Field::from_fn(g.clone(), |x| 0.3 * x.tangential[0] + 0.5 * x.normal);
    f.values.iter_mut().for_each(|v| *v += rng.gen_range(-0.1..0.1));
    f
}

#[test]
fn update_is_monotone_in_every_node() {
    let g = grid();
    for seed in 0..5 {
        let u = random_field(&g, seed);
        let base = one_step(&u, &u);
        for node in 0..g.node_count() {
            let mut v = u.clone();
            v.values[node] += 1e-3;
            let bumped = one_step(&u, &v);
            for (a, b) in bumped.values.iter().zip(&base.values) {
                assert!(a - b >= -1e-14, "seed {seed} node {node}: {a} < {b}");
            }
        }
    }
}

#[test]
fn update_commutes_with_constants() {
    let g = grid();
    let u = random_field(&g, 9);
    let mut shifted = u.clone();
    shifted.values.iter_mut().for_each(|v| *v += 2.5);
    let a = one_step(&u, &u);
    let b = one_step(&u, &shifted);
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((y - x - 2.5).abs() < 1e-12);
    }
}

#[test]
fn equal_hamiltonians_reduce_to_hopf_lax() {
    let grid = Arc::new(
        EuclideanGrid::build(&GridConfig {
            branches: 2,
            tangential: vec![],
            normal_extent: 3.0,
            normal_spacing: 1.0 / 40.0,
        })
        .unwrap(),
    );
    let h: Arc<dyn Hamiltonian> = Arc::new(Quadratic::standard(0));
    let u0 = EuclideanField::from_fn(grid, |_, x| x.abs().min(1.0));
    let sols = extremal_solutions(&TwoDomainProblem::new(h.clone(), h, u0, 0.4)).unwrap();
    let oracle = HopfLax::new(1, |z: &[f64]| Ok(z[0] * z[0] / 4.0));
    let (lo, hi) = (sols.minimal.fields.last().unwrap(), sols.maximal.fields.last().unwrap());
    assert_eq!(lo.values, hi.values);
    for i in 0..lo.grid.node_count() {
        let (_, x) = lo.grid.coords(i);
        let exact = oracle.value(|y| y[0].abs().min(1.0), 0.4, &[x]).unwrap();
        assert!((lo.values[i] - exact).abs() < 0.03, "x = {x}: {} vs {exact}", lo.values[i]);
    }
}

#[test]
fn general_junction_function_runs_through_its_limiter() {
    // F = 2 - (p_1 + p_2) on quadratic branches behaves like A = (sqrt 3 - 1)^2
    let g = Arc::new(
        JunctionGrid::build(&GridConfig { branches: 2, tangential: vec![], normal_extent: 1.0, normal_spacing: 0.1 })
            .unwrap(),
    );
    let hs: Vec<Arc<dyn Hamiltonian>> = vec![Arc::new(Quadratic::standard(0)), Arc::new(Quadratic::standard(0))];
    let u0 = Field::constant(g.clone(), 0.0);
    let f = Arc::new(LinearJunction::new(0, 2.0, vec![1.0, 1.0]));
    let reduced = ReducedLimiter::new(f.clone(), hs.clone());
    let lambda = reduced.eval(&[]);
    let p = Problem::with_junction_function(hs, f, u0, 0.05).unwrap();
    let last = solve(&p).unwrap().last().clone();
    assert!((last.values[0] + 0.05 * lambda).abs() < 1e-9, "{}", last.values[0]);
}

fn family() -> impl Strategy<Value = Arc<dyn Hamiltonian>> {
    prop_oneof![
        (-2.0..2.0f64, -2.0..2.0f64, -1.0..1.0f64)
            .prop_map(|(bt, b, c)| Arc::new(Quadratic::new(vec![bt], b, c)) as Arc<dyn Hamiltonian>),
        (0.2..3.0f64, 0.2..3.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, gt, g)| {
            Arc::new(Anisotropic::new(a, b, vec![gt], g).unwrap()) as Arc<dyn Hamiltonian>
        }),
    ]
}

proptest! {
    #[test]
    fn pi_plus_concave_pi_minus_convex(h in family(), pt in -2.0..2.0f64, s in 0.0..5.0f64, t in 0.0..5.0f64) {
        let a = jhj_core::hamiltonian::branch_min(&h, &[pt]).unwrap();
        let (l1, l2) = (a + s, a + t);
        let mid = 0.5 * (l1 + l2);
        let plus = |l: f64| pi_pm(&h, &[pt], l, Side::Plus).unwrap();
        let minus = |l: f64| pi_pm(&h, &[pt], l, Side::Minus).unwrap();
        prop_assert!(plus(mid) >= 0.5 * (plus(l1) + plus(l2)) - 1e-9);
        prop_assert!(minus(mid) <= 0.5 * (minus(l1) + minus(l2)) + 1e-9);
        prop_assert!(minus(l1) <= pi0(&h, &[pt]).unwrap() + 1e-12);
    }

    #[test]
    fn ishii_limiters_are_ordered(l in family(), r in family(), pt in -2.0..2.0f64) {
        let c = ishii_limiters(&l, &r, &[pt]).unwrap();
        prop_assert!(c.a0 <= c.minus && c.minus <= c.plus);
        if pi0(&r, &[pt]).unwrap() < pi0(&l, &[pt]).unwrap() {
            prop_assert_eq!(c.minus, c.plus);
        }
    }
}
