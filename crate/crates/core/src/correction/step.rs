//! Splitting a step function into small a-adic blocks `φ = Σ γ_ν χ_Δν`.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::adic::{checked_pow, AdicInterval, CellSet, Config, Measure, Norm, StepFunction};
use crate::error::{Error, Result};

/// `φ` together with the cells of `f` it leaves alone (where `f = 0`).
#[derive(Debug, Clone)]
pub struct StepApproximation {
    /// Sorted by `|γ||Δ|` descending, ties by left endpoint.
    pub intervals: Vec<AdicInterval>,
    pub gammas: Vec<Complex64>,
    pub uncovered: CellSet,
    /// The per-block cap `ε³‖f‖₁²/(16a²)` on `|γ|²|Δ|`.
    pub energy_bound: f64,
}

impl StepApproximation {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn products(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals
            .iter()
            .zip(&self.gammas)
            .map(|(d, g)| g.norm() * d.measure_f64())
    }

    /// Number of adjacent equal products (the chain can only be non-strict
    /// when one value fills several equal intervals).
    pub fn ties(&self) -> usize {
        let p: Vec<f64> = self.products().collect();
        p.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// `‖f - φ‖₁`, summed exactly per cell of `f`.
    pub fn residual_l1(&self, f: &StepFunction) -> f64 {
        let a = f.order() as u64;
        let mut covered = vec![Measure::zero(); f.len()];
        let mut total = 0.0;
        for (d, g) in self.intervals.iter().zip(&self.gammas) {
            let cell = (d.cell() / a.pow(d.level() - f.level())) as usize;
            total += (f.values()[cell] - g).norm() * d.measure_f64();
            covered[cell] = &covered[cell] + &d.measure();
        }
        let cell_measure = Measure::inv_pow(f.order(), f.level());
        for (c, v) in f.values().iter().enumerate() {
            total += (cell_measure.clone() - covered[c].clone()).to_f64() * v.norm();
        }
        total
    }

    /// `Σ |γ||Δ|`.
    pub fn l1_norm(&self) -> f64 {
        self.products().sum()
    }
}

/// Splits every nonzero cell of `f` into equal a-adic pieces of the coarsest
/// level `L >= max(J, 1)` meeting `|f_c|²a^-L < ε³‖f‖₁²/(16a²)`,
/// `|f_c|a^-L < ε/2` and, if given, `|f_c|a^-L <= cap`. Each piece carries
/// `γ = f_c`, so `φ = f` wherever it is defined.
pub fn step_approximate(
    f: &StepFunction,
    eps: f64,
    cap: Option<f64>,
    config: &Config,
) -> Result<StepApproximation> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsOutOfRange(eps));
    }
    let norm_f = f.norm(Norm::L1);
    if norm_f == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let order = f.order();
    let a = order as f64;
    let bound = eps.powi(3) * norm_f * norm_f / (16.0 * a * a);
    let start = f.level().max(1);

    let mut levels = Vec::new();
    let mut zero_cells = Vec::new();
    let mut count = 0u128;
    for (c, v) in f.values().iter().enumerate() {
        let mag = v.norm();
        if mag == 0.0 {
            zero_cells.push(c as u64);
            continue;
        }
        let mut level = start;
        loop {
            let w = a.powi(-(level as i32));
            let fits = mag * mag * w < bound && mag * w < eps / 2.0;
            let capped = cap.is_none_or(|c| mag * w <= c);
            if fits && capped {
                break;
            }
            level += 1;
            if checked_pow(order, level).is_none() {
                return Err(Error::Infeasible {
                    reason: format!("cell {c} would need intervals finer than a^-{level}"),
                });
            }
        }
        count += (order as u128).pow(level - f.level());
        if count > config.max_blocks as u128 {
            return Err(Error::Infeasible {
                reason: format!(
                    "more than {} blocks needed (per-block energy bound {bound:.3e})",
                    config.max_blocks
                ),
            });
        }
        levels.push((c as u64, level, *v));
    }

    let mut pieces: Vec<(AdicInterval, Complex64, f64)> = Vec::with_capacity(count as usize);
    for (c, level, v) in levels {
        let split = (order as u64).pow(level - f.level());
        let w = a.powi(-(level as i32));
        for child in c * split..(c + 1) * split {
            pieces.push((AdicInterval::from_cell(order, level, child)?, v, v.norm() * w));
        }
    }
    let top = pieces.iter().map(|p| p.0.level()).max().unwrap_or(0);
    let left = |d: &AdicInterval| d.cell() as u128 * (order as u128).pow(top - d.level());
    pieces.sort_by(|x, y| {
        y.2.partial_cmp(&x.2)
            .unwrap_or(Ordering::Equal)
            .then_with(|| left(&x.0).cmp(&left(&y.0)))
    });
    Ok(StepApproximation {
        intervals: pieces.iter().map(|p| p.0).collect(),
        gammas: pieces.iter().map(|p| p.1).collect(),
        uncovered: CellSet::new(order, f.level(), zero_cells)?,
        energy_bound: bound,
    })
}
