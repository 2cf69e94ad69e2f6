//! Finite Walsh polynomials with machine-word indices.

use num_complex::Complex64;

use crate::adic::{Norm, StepFunction};
use crate::error::{Error, Result};
use crate::walsh::{accumulate_term, level_for_index, PhaseTable, Spectrum};

/// `Σ c_k ψ_{n_k}` with strictly increasing `n_k` and no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct WalshPolynomial {
    order: u32,
    terms: Vec<(u64, Complex64)>,
}

impl WalshPolynomial {
    pub fn new(order: u32, mut terms: Vec<(u64, Complex64)>) -> Result<Self> {
        terms.retain(|t| t.1 != Complex64::new(0.0, 0.0));
        terms.sort_by_key(|t| t.0);
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("repeated polynomial index".into()));
        }
        Ok(WalshPolynomial { order, terms })
    }

    /// Coefficients above `threshold` in magnitude.
    pub fn from_spectrum(spec: &Spectrum, threshold: f64) -> Self {
        let terms = spec
            .coefficients()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > threshold)
            .map(|(n, &c)| (n as u64, c))
            .collect();
        WalshPolynomial {
            order: spec.order(),
            terms,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &[(u64, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn indices(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    /// Smallest level whose grid resolves every term.
    pub fn min_level(&self) -> u32 {
        self.terms
            .last()
            .map(|t| level_for_index(self.order, t.0))
            .unwrap_or(0)
    }

    pub fn to_spectrum(&self, level: u32) -> Result<Spectrum> {
        Spectrum::from_pairs(self.order, level, self.terms.iter().copied())
    }

    pub fn synthesize(&self, level: u32) -> Result<StepFunction> {
        crate::walsh::synthesize(&self.to_spectrum(level)?, level)
    }

    /// `max_M ‖Σ_{k<=M} c_k ψ_{n_k}‖₁` over every prefix in index order.
    pub fn max_prefix_l1(&self, level: u32) -> Result<f64> {
        let table = PhaseTable::new(self.order);
        let mut partial = StepFunction::zero(self.order, level)?.into_values();
        let mut best = 0.0f64;
        for &(n, c) in &self.terms {
            if n >= partial.len() as u64 {
                return Err(Error::Resolution {
                    needed: level_for_index(self.order, n) as u64,
                    max: level,
                });
            }
            accumulate_term(&mut partial, &table, level, n, c);
            let l1 = partial.iter().map(|v| v.norm()).sum::<f64>() / partial.len() as f64;
            best = best.max(l1);
        }
        Ok(best)
    }

    pub fn norm(&self, level: u32, p: Norm) -> Result<f64> {
        Ok(self.synthesize(level)?.norm(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_zeros_and_sorts() {
        let p = WalshPolynomial::new(
            2,
            vec![(3, Complex64::new(1.0, 0.0)), (1, Complex64::new(0.0, 0.0)), (0, Complex64::new(2.0, 0.0))],
        )
        .unwrap();
        assert_eq!(p.indices(), vec![0, 3]);
        assert_eq!(p.min_level(), 2);
        assert!(WalshPolynomial::new(2, vec![(1, Complex64::new(1.0, 0.0)); 2]).is_err());
    }

    #[test]
    fn prefix_norms() {
        let p = WalshPolynomial::new(2, vec![(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(1.0, 0.0))]).unwrap();
        // prefixes: 1 (norm 1), 1+ψ_1 = [2, 0] (norm 1)
        assert!((p.max_prefix_l1(1).unwrap() - 1.0).abs() < 1e-15);
        assert!(p.max_prefix_l1(0).is_err());
    }
}
