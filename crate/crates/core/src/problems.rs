//! Small analytic problems with known solutions, used in tests and examples.

use alloc::vec::Vec;

use crate::moo::{BiObjectiveProblem, ObjectiveBounds, ObjectivePair};

/// Separable quadratic pair on the simplex-box:
/// f1(p) = ||p - c1||², f2(p) = ||p - c2||², D = { p >= 0, sum(p) <= budget }.
///
/// With one variable, c1 = 0, c2 = 1 and budget 1 this is the classic
/// (p², (1-p)²) tradeoff on [0, 1].
#[derive(Debug, Clone)]
pub struct SeparableQuadratic {
    pub target1: Vec<f64>,
    pub target2: Vec<f64>,
    pub budget: f64,
}

impl SeparableQuadratic {
    pub fn new(target1: Vec<f64>, target2: Vec<f64>, budget: f64) -> Self {
        assert_eq!(target1.len(), target2.len());
        assert!(budget > 0.0);
        Self { target1, target2, budget }
    }

    /// The one-dimensional (p², (1-p)²) instance on [0, 1].
    pub fn unit_tradeoff() -> Self {
        Self::new(alloc::vec![0.0], alloc::vec![1.0], 1.0)
    }

    fn dist2(p: &[f64], c: &[f64]) -> f64 {
        p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

impl BiObjectiveProblem for SeparableQuadratic {
    fn dimension(&self) -> usize {
        self.target1.len()
    }

    fn budget(&self) -> f64 {
        self.budget
    }

    fn objectives(&self, p: &[f64]) -> ObjectivePair {
        ObjectivePair::new(Self::dist2(p, &self.target1), Self::dist2(p, &self.target2))
    }

    fn objective_gradients(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let g1 = p.iter().zip(&self.target1).map(|(a, b)| 2.0 * (a - b)).collect();
        let g2 = p.iter().zip(&self.target2).map(|(a, b)| 2.0 * (a - b)).collect();
        (g1, g2)
    }

    fn objective_hessians(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = p.len();
        let mut h = alloc::vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = 2.0;
        }
        (h.clone(), h)
    }

    fn objective_bounds(&self) -> ObjectiveBounds {
        // f1 >= 0 always; per-coordinate reach of the box bounds f2 from above
        let f2_max = self
            .target2
            .iter()
            .map(|&c| {
                let lo = c * c;
                let hi = (self.budget - c) * (self.budget - c);
                lo.max(hi)
            })
            .sum();
        ObjectiveBounds { f1_min: 0.0, f2_max }
    }
}
