//! Gauss–Hermite rules for the weight e^{−u²} and deterministic summation.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Rule with `order` nodes, found by Newton iteration on the orthonormal
    /// Hermite recurrence. Nodes are sorted ascending.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let nf = n as f64;
        let pim4 = PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        let mut z = 0.0f64;

        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            // the i-th positive root, descending
            nodes[i] = z;
            weights[i] = 2.0 / (pp * pp);
        }

        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
        for i in 0..half {
            pairs.push((nodes[i], weights[i]));
            if !(n % 2 == 1 && i == half - 1) {
                pairs.push((-nodes[i], weights[i]));
            }
        }
        if n % 2 == 1 {
            // the middle root is zero up to Newton precision
            if let Some(mid) = pairs.iter_mut().find(|(x, _)| x.abs() < 1e-12) {
                mid.0 = 0.0;
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussHermite {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Pairwise (cascade) summation in fixed order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for n in [2, 3, 5, 16, 64, 65, 128] {
            let r = GaussHermite::new(n);
            assert_eq!(r.order(), n);
            let s = pairwise_sum(r.weights());
            assert!((s - PI.sqrt()).abs() < 1e-13, "n={n}: {s}");
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn two_point_rule() {
        let r = GaussHermite::new(2);
        let x = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.nodes()[1] - x).abs() < 1e-15);
        assert!((r.weights()[0] - PI.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_low_moments() {
        // ∫u^{2k} e^{−u²} du = Γ(k+1/2)
        let r = GaussHermite::new(64);
        let moment = |k: i32| -> f64 {
            let v: Vec<f64> = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.powi(2 * k)).collect();
            pairwise_sum(&v)
        };
        let sp = PI.sqrt();
        assert!((moment(1) - sp / 2.0).abs() < 1e-13);
        assert!((moment(2) - 3.0 * sp / 4.0).abs() < 1e-13);
        assert!((moment(3) - 15.0 * sp / 8.0).abs() < 1e-12);
    }

    #[test]
    fn odd_rule_has_zero_node() {
        let r = GaussHermite::new(5);
        assert_eq!(r.nodes()[2], 0.0);
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
    }
}
