//! Greedy (thresholding) m-term approximation over a spectrum.

use num_complex::Complex64;

use crate::adic::{cells, Norm, StepFunction};
use crate::error::{Error, Result};
use crate::walsh::{accumulate_term, analyze, Method, PhaseTable, Spectrum};

/// Coefficients at or below this magnitude are treated as absent.
pub const DEFAULT_HARD_ZERO: f64 = 1e-14;

/// Support indices ranked by decreasing magnitude, ties by ascending index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GreedyOrdering {
    pub ranked: Vec<u64>,
    pub magnitudes: Vec<f64>,
}

impl GreedyOrdering {
    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }
}

pub fn greedy_order(spec: &Spectrum) -> GreedyOrdering {
    greedy_order_with(spec, DEFAULT_HARD_ZERO)
}

pub fn greedy_order_with(spec: &Spectrum, hard_zero: f64) -> GreedyOrdering {
    let pairs: Vec<(u64, Complex64)> = spec
        .coefficients()
        .iter()
        .enumerate()
        .map(|(n, &c)| (n as u64, c))
        .collect();
    order_pairs(&pairs, hard_zero)
}

/// Ranking of arbitrary `(index, coefficient)` pairs; input order is irrelevant.
pub fn order_pairs(pairs: &[(u64, Complex64)], hard_zero: f64) -> GreedyOrdering {
    let mut kept: Vec<(u64, f64)> = pairs
        .iter()
        .map(|&(n, c)| (n, c.norm()))
        .filter(|&(_, m)| m > hard_zero)
        .collect();
    kept.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    GreedyOrdering {
        ranked: kept.iter().map(|p| p.0).collect(),
        magnitudes: kept.iter().map(|p| p.1).collect(),
    }
}

/// `G_m`: synthesis of the `m` highest-ranked terms on the level-`level` grid.
pub fn greedy_approximant(spec: &Spectrum, m: usize, level: u32) -> Result<StepFunction> {
    let order = spec.order();
    let n = cells(order, level)?;
    let ranking = greedy_order(spec);
    let table = PhaseTable::new(order);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for &k in ranking.ranked.iter().take(m) {
        if k >= n as u64 {
            return Err(Error::Resolution {
                needed: crate::walsh::level_for_index(order, k) as u64,
                max: level,
            });
        }
        accumulate_term(&mut values, &table, level, k, spec.get(k));
    }
    StepFunction::new(order, level, values)
}

/// One row of an error curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub m: usize,
    pub error: f64,
    pub partial_sum_l1: f64,
}

/// `(m, ‖G_m f − f‖_p, ‖G_m f‖₁)` for `m = 0 ..= min(m_max, |support|)`.
pub fn greedy_error_curve(f: &StepFunction, m_max: usize, p: Norm) -> Result<Vec<CurvePoint>> {
    if p == Norm::Sup {
        return Err(Error::InvalidArgument("error curves use p = 1 or p = 2".into()));
    }
    let spec = analyze(f, Method::Fast)?;
    let ranking = greedy_order(&spec);
    let table = PhaseTable::new(f.order());
    let mut partial = StepFunction::zero(f.order(), f.level())?.into_values();
    let mut curve = Vec::with_capacity(m_max.min(ranking.len()) + 1);
    let point = |m: usize, partial: &[Complex64]| -> Result<CurvePoint> {
        let g = StepFunction::new(f.order(), f.level(), partial.to_vec())?;
        Ok(CurvePoint {
            m,
            error: g.sub(f)?.norm(p),
            partial_sum_l1: g.norm(Norm::L1),
        })
    };
    curve.push(point(0, &partial)?);
    for (i, &k) in ranking.ranked.iter().take(m_max).enumerate() {
        accumulate_term(&mut partial, &table, f.level(), k, spec.get(k));
        curve.push(point(i + 1, &partial)?);
    }
    Ok(curve)
}

/// The curve as CSV with header `m,error_p,partial_sum_norm_1`.
pub fn curve_csv(curve: &[CurvePoint]) -> String {
    let mut out = String::from("m,error_p,partial_sum_norm_1\n");
    for pt in curve {
        out.push_str(&format!("{},{:.16e},{:.16e}\n", pt.m, pt.error, pt.partial_sum_l1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ordering_examples() {
        let s = Spectrum::from_pairs(2, 2, [(1, c(0.5)), (2, c(-0.9)), (3, c(0.2))]).unwrap();
        assert_eq!(greedy_order(&s).ranked, vec![2, 1, 3]);
        let s = Spectrum::from_pairs(2, 2, [(1, c(0.5)), (2, c(0.5))]).unwrap();
        assert_eq!(greedy_order(&s).ranked, vec![1, 2]);
        let s = Spectrum::from_pairs(2, 2, []).unwrap();
        assert!(greedy_order(&s).is_empty());
        let s = Spectrum::from_pairs(2, 2, [(1, c(1e-15)), (2, c(1.0))]).unwrap();
        assert_eq!(greedy_order(&s).ranked, vec![2]);
    }

    #[test]
    fn approximant_examples() {
        let s = Spectrum::from_pairs(2, 1, [(0, c(1.0)), (1, c(-2.0))]).unwrap();
        let g = greedy_approximant(&s, 1, 1).unwrap();
        assert_eq!(g.values(), &[c(-2.0), c(2.0)]);
        let g = greedy_approximant(&s, 0, 1).unwrap();
        assert!(g.values().iter().all(|v| *v == c(0.0)));
        let g = greedy_approximant(&s, 10, 1).unwrap();
        assert_eq!(g.values(), &[c(-1.0), c(3.0)]);
        let s = Spectrum::from_pairs(2, 3, [(5, c(1.0))]).unwrap();
        assert!(matches!(greedy_approximant(&s, 1, 2), Err(Error::Resolution { .. })));
    }

    #[test]
    fn curve_examples() {
        let s = Spectrum::from_pairs(3, 2, [(4, c(2.0))]).unwrap();
        let f = crate::walsh::synthesize(&s, 2).unwrap();
        let curve = greedy_error_curve(&f, 1, Norm::L1).unwrap();
        assert_eq!(curve.len(), 2);
        assert!((curve[0].error - 2.0).abs() < 1e-12);
        assert!(curve[1].error < 1e-12);
        let csv = curve_csv(&curve);
        assert!(csv.starts_with("m,error_p,partial_sum_norm_1\n0,"));
        assert!(greedy_error_curve(&f, 1, Norm::Sup).is_err());
    }
}
