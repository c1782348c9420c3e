use serde::{Deserialize, Serialize};

/// A point of the junction: tangential coordinates `x'` and a normal
/// coordinate `x >= 0` on branch `branch` (0-based). On the interface
/// (`normal == 0`) the branch tag carries no information.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JunctionPoint {
    pub branch: usize,
    pub tangential: Vec<f64>,
    pub normal: f64,
}

impl JunctionPoint {
    pub fn new(branch: usize, tangential: Vec<f64>, normal: f64) -> Self {
        assert!(normal >= 0.0, "normal coordinate must be non-negative, got {normal}");
        JunctionPoint { branch, tangential, normal }
    }

    /// Interface point `(x', 0)`.
    pub fn interface(tangential: Vec<f64>) -> Self {
        JunctionPoint { branch: 0, tangential, normal: 0.0 }
    }

    pub fn on_interface(&self) -> bool {
        self.normal == 0.0
    }

    pub fn dim(&self) -> usize {
        self.tangential.len()
    }
}

impl PartialEq for JunctionPoint {
    fn eq(&self, other: &Self) -> bool {
        self.tangential == other.tangential
            && self.normal == other.normal
            && (self.normal == 0.0 || self.branch == other.branch)
    }
}

/// `|x' - y'| + d(x, y)` where `d` is `|x - y|` on a common branch (or when
/// one point is on the interface) and `x + y` across branches.
pub fn junction_distance(x: &JunctionPoint, y: &JunctionPoint) -> f64 {
    let tangential = x.tangential.iter().zip(&y.tangential).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let normal = if x.branch == y.branch || x.on_interface() || y.on_interface() {
        (x.normal - y.normal).abs()
    } else {
        x.normal + y.normal
    };
    tangential + normal
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distance_examples() {
        let x = JunctionPoint::new(0, vec![0.0], 2.0);
        let y = JunctionPoint::new(0, vec![0.0], 5.0);
        assert_eq!(junction_distance(&x, &y), 3.0);

        let x = JunctionPoint::new(0, vec![1.0], 2.0);
        let y = JunctionPoint::new(1, vec![4.0], 5.0);
        assert_eq!(junction_distance(&x, &y), 10.0);

        assert_eq!(junction_distance(&x, &x), 0.0);
    }

    #[test]
    fn interface_points_ignore_branch() {
        let a = JunctionPoint::new(0, vec![0.5, 1.0], 0.0);
        let b = JunctionPoint::new(2, vec![0.5, 1.0], 0.0);
        assert_eq!(a, b);
        assert_eq!(junction_distance(&a, &b), 0.0);
        let c = JunctionPoint::new(2, vec![0.5, 1.0], 1.0);
        assert_ne!(a, c);
        assert_eq!(junction_distance(&a, &c), 1.0);
    }

    fn random_point(rng: &mut ChaCha8Rng) -> JunctionPoint {
        let on_gamma = rng.gen_bool(0.2);
        JunctionPoint::new(
            rng.gen_range(0..3),
            vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
            if on_gamma { 0.0 } else { rng.gen_range(0.0..4.0) },
        )
    }

    #[test]
    fn metric_axioms_on_sampled_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let (x, y, z) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
            let dxy = junction_distance(&x, &y);
            assert!(dxy >= 0.0);
            assert_eq!(dxy, junction_distance(&y, &x));
            assert_eq!(dxy == 0.0, x == y);
            assert!(dxy <= junction_distance(&x, &z) + junction_distance(&z, &y) + 1e-12);
        }
    }
}
