//! Composite Gauss–Legendre quadrature for complex integrands.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

/// A fixed-order Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct PanelRule {
    pairs: Vec<(f64, f64)>,
}

impl PanelRule {
    pub fn new(order: usize) -> Result<Self> {
        let order = NonZeroUsize::new(order)
            .filter(|o| o.get() >= 2)
            .ok_or_else(|| Error::param("quad_order", "must be at least 2"))?;
        let rule = GaussLegendre::new(order);
        Ok(Self {
            pairs: rule.as_node_weight_pairs().to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// ∫ₐᵇ f on a single panel.
    pub fn panel<F: Fn(f64) -> Complex64>(&self, a: f64, b: f64, f: &F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let terms: Vec<Complex64> = self
            .pairs
            .iter()
            .map(|&(x, w)| f(mid + half * x) * w)
            .collect();
        pairwise_sum(&terms) * half
    }

    /// ∫ over consecutive panels given by sorted breakpoints.
    pub fn composite<F: Fn(f64) -> Complex64>(&self, breaks: &[f64], f: &F) -> Complex64 {
        let parts: Vec<Complex64> = breaks
            .windows(2)
            .map(|w| self.panel(w[0], w[1], f))
            .collect();
        pairwise_sum(&parts)
    }

    /// Nodes mapped into [a, b] with their scaled weights.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.pairs.iter().map(move |&(x, w)| (mid + half * x, w * half))
    }
}

/// `n` equal panels covering [a, b].
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|k| {
            if k == n {
                b
            } else {
                a + (b - a) * k as f64 / n as f64
            }
        })
        .collect()
}
