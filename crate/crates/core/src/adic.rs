//! a-adic intervals, level-J step functions and exact measures.
//!
//! Every function handled by the crate is constant on the cells
//! `[(j)/a^J, (j+1)/a^J)` of some level-J grid. Measures of unions of such
//! cells are a-adic rationals and are kept exact in [`Measure`].

use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of cells of a dense grid.
pub const DEFAULT_MAX_CELLS: u64 = 2_000_000;

/// Resolution limits shared by all dense operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub order: u32,
    /// Largest level a dense step function may have.
    pub max_level: u32,
    /// Coefficients below this magnitude are treated as exact zeros.
    pub hard_zero: f64,
    /// Upper bound on the number of blocks a structured construction may emit.
    pub max_blocks: usize,
}

impl Config {
    /// Limits for order `a`: the largest `J` with `a^J <= 2e6` (20 for a = 2).
    pub fn for_order(order: u32) -> Result<Self> {
        check_order(order)?;
        let mut level = 0u32;
        while let Some(n) = checked_pow(order, level + 1) {
            if n > DEFAULT_MAX_CELLS {
                break;
            }
            level += 1;
        }
        Ok(Config {
            order,
            max_level: level,
            hard_zero: 1e-14,
            max_blocks: 2_000_000,
        })
    }

    pub fn with_max_level(mut self, max_level: u32) -> Self {
        self.max_level = max_level;
        self
    }

    pub fn ensure_level(&self, level: u64) -> Result<()> {
        if level > self.max_level as u64 {
            return Err(Error::Resolution {
                needed: level,
                max: self.max_level,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_order(order: u32) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidOrder(order));
    }
    Ok(())
}

/// `a^e` if it fits in a `u64`.
pub fn checked_pow(a: u32, e: u32) -> Option<u64> {
    (a as u64).checked_pow(e)
}

pub(crate) fn cells(order: u32, level: u32) -> Result<usize> {
    checked_pow(order, level)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or(Error::Resolution {
            needed: level as u64,
            max: 0,
        })
}

/// Exact nonnegative measure, stored as a rational number.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure(pub BigRational);

impl Measure {
    pub fn zero() -> Self {
        Measure(BigRational::zero())
    }

    pub fn one() -> Self {
        Measure(BigRational::one())
    }

    /// `count · a^(-level)`.
    pub fn cells(count: u64, order: u32, level: u32) -> Self {
        let den = BigInt::from(order).pow(level);
        Measure(BigRational::new(BigInt::from(count), den))
    }

    /// `a^(-e)` for arbitrary (possibly huge) exponents is never needed; the
    /// exponent stays a `u32`.
    pub fn inv_pow(order: u32, e: u32) -> Self {
        Measure::cells(1, order, e)
    }

    /// Exact value of a finite double.
    pub fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Measure)
            .ok_or_else(|| Error::Precision(format!("{x} is not finite")))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn mul(&self, other: &Measure) -> Measure {
        Measure(&self.0 * &other.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl Add for Measure {
    type Output = Measure;
    fn add(self, rhs: Measure) -> Measure {
        Measure(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Measure> for &'a Measure {
    type Output = Measure;
    fn add(self, rhs: &Measure) -> Measure {
        Measure(&self.0 + &rhs.0)
    }
}

impl Sub for Measure {
    type Output = Measure;
    fn sub(self, rhs: Measure) -> Measure {
        Measure(self.0 - rhs.0)
    }
}

impl std::iter::Sum for Measure {
    fn sum<I: Iterator<Item = Measure>>(iter: I) -> Self {
        iter.fold(Measure::zero(), |acc, m| acc + m)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The a-adic interval `[(k-1)/a^m, k/a^m)`, with `1 <= k <= a^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdicInterval {
    order: u32,
    level: u32,
    index: u64,
}

impl AdicInterval {
    pub fn new(order: u32, level: u32, index: u64) -> Result<Self> {
        check_order(order)?;
        let count = checked_pow(order, level).ok_or(Error::InvalidInterval {
            order,
            level,
            index,
        })?;
        if index == 0 || index > count {
            return Err(Error::InvalidInterval {
                order,
                level,
                index,
            });
        }
        Ok(AdicInterval {
            order,
            level,
            index,
        })
    }

    /// The interval holding cell `cell` (zero-based) of the level grid.
    pub fn from_cell(order: u32, level: u32, cell: u64) -> Result<Self> {
        Self::new(order, level, cell + 1)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// One-based index `k`.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Zero-based cell number on the interval's own level.
    pub fn cell(&self) -> u64 {
        self.index - 1
    }

    pub fn measure(&self) -> Measure {
        Measure::inv_pow(self.order, self.level)
    }

    pub fn measure_f64(&self) -> f64 {
        (self.order as f64).powi(-(self.level as i32))
    }

    /// Half-open range of level-`level` cells covered by the interval.
    pub fn cell_range(&self, level: u32) -> Result<std::ops::Range<u64>> {
        if level < self.level {
            return Err(Error::Resolution {
                needed: self.level as u64,
                max: level,
            });
        }
        let scale = checked_pow(self.order, level - self.level).ok_or(Error::Resolution {
            needed: level as u64,
            max: 0,
        })?;
        Ok(self.cell() * scale..(self.cell() + 1) * scale)
    }

    /// The `a` children one level down.
    pub fn children(&self) -> impl Iterator<Item = AdicInterval> + '_ {
        let a = self.order as u64;
        (0..a).map(move |t| AdicInterval {
            order: self.order,
            level: self.level + 1,
            index: self.cell() * a + t + 1,
        })
    }

    pub fn contains(&self, other: &AdicInterval) -> bool {
        if other.level < self.level || other.order != self.order {
            return false;
        }
        let shift = other.level - self.level;
        match checked_pow(self.order, shift) {
            Some(scale) => other.cell() / scale == self.cell(),
            None => false,
        }
    }
}

impl fmt::Display for AdicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.index)
    }
}

/// Parse the `m:k` command-line syntax.
pub fn parse_interval(order: u32, s: &str) -> Result<AdicInterval> {
    let (m, k) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("interval '{s}' is not of the form m:k")))?;
    let m: u32 = m
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad level in '{s}'")))?;
    let k: u64 = k
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad index in '{s}'")))?;
    AdicInterval::new(order, m, k)
}

/// Which norm [`StepFunction::norm`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Sup,
}

/// A complex function constant on every cell of the level-`level` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    order: u32,
    level: u32,
    values: Vec<Complex64>,
}

impl StepFunction {
    pub fn new(order: u32, level: u32, values: Vec<Complex64>) -> Result<Self> {
        check_order(order)?;
        let n = cells(order, level)?;
        if values.len() != n {
            return Err(Error::InvalidArgument(format!(
                "step function at order {order}, level {level} needs {n} values, got {}",
                values.len()
            )));
        }
        Ok(StepFunction {
            order,
            level,
            values,
        })
    }

    pub fn from_real(order: u32, level: u32, values: &[f64]) -> Result<Self> {
        Self::new(
            order,
            level,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zero(order: u32, level: u32) -> Result<Self> {
        Self::constant(order, level, Complex64::new(0.0, 0.0))
    }

    pub fn constant(order: u32, level: u32, value: Complex64) -> Result<Self> {
        check_order(order)?;
        Self::new(order, level, vec![value; cells(order, level)?])
    }

    /// Cell averages of `f` on the level-`level` grid, computed with a
    /// `samples`-point midpoint rule per cell.
    pub fn project<F: Fn(f64) -> f64>(order: u32, level: u32, samples: usize, f: F) -> Result<Self> {
        let n = cells(order, level)?;
        let width = 1.0 / n as f64;
        let samples = samples.max(1);
        let values = (0..n)
            .map(|j| {
                let left = j as f64 * width;
                let sum: f64 = (0..samples)
                    .map(|t| f(left + (t as f64 + 0.5) * width / samples as f64))
                    .sum();
                Complex64::new(sum / samples as f64, 0.0)
            })
            .collect();
        Self::new(order, level, values)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_measure(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    /// Exact refinement to a finer grid: each cell is copied `a^(level - J)` times.
    pub fn refine(&self, level: u32) -> Result<StepFunction> {
        if level < self.level {
            return Err(Error::Resolution {
                needed: self.level as u64,
                max: level,
            });
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let rep = cells(self.order, level - self.level)?;
        cells(self.order, level)?;
        let values = self
            .values
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, rep))
            .collect();
        StepFunction::new(self.order, level, values)
    }

    /// Refine `self` and `other` to a common level.
    pub fn reconcile(&self, other: &StepFunction) -> Result<(StepFunction, StepFunction)> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        let level = self.level.max(other.level);
        Ok((self.refine(level)?, other.refine(level)?))
    }

    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(
        &self,
        other: &StepFunction,
        op: F,
    ) -> Result<StepFunction> {
        let (lhs, rhs) = self.reconcile(other)?;
        let values = lhs
            .values
            .iter()
            .zip(rhs.values.iter())
            .map(|(&x, &y)| op(x, y))
            .collect();
        StepFunction::new(lhs.order, lhs.level, values)
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn scale(&self, c: Complex64) -> StepFunction {
        StepFunction {
            order: self.order,
            level: self.level,
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }

    /// Riemann sum `a^(-J) Σ |f|^p`, then the p-th root; the maximum for `Sup`.
    pub fn norm(&self, p: Norm) -> f64 {
        match p {
            Norm::L1 => self.values.iter().map(|v| v.norm()).sum::<f64>() * self.cell_measure(),
            Norm::L2 => (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
                * self.cell_measure())
            .sqrt(),
            Norm::Sup => self.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// `x ↦ f(a^s x mod 1)`: the function tiled `a^s` times.
    pub fn dilate(&self, s: u32, config: &Config) -> Result<StepFunction> {
        let level = self.level as u64 + s as u64;
        config.ensure_level(level)?;
        let copies = cells(self.order, s)?;
        let mut values = Vec::with_capacity(self.values.len() * copies);
        for _ in 0..copies {
            values.extend_from_slice(&self.values);
        }
        StepFunction::new(self.order, level as u32, values)
    }
}

/// A finite set of cells of one grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSet {
    pub order: u32,
    pub level: u32,
    members: Vec<u64>,
}

impl CellSet {
    pub fn new(order: u32, level: u32, mut members: Vec<u64>) -> Result<Self> {
        check_order(order)?;
        let n = checked_pow(order, level).ok_or(Error::Resolution {
            needed: level as u64,
            max: 0,
        })?;
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last >= n {
                return Err(Error::InvalidArgument(format!(
                    "cell {last} outside level {level} grid"
                )));
            }
        }
        Ok(CellSet {
            order,
            level,
            members,
        })
    }

    pub fn empty(order: u32, level: u32) -> Result<Self> {
        Self::new(order, level, Vec::new())
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, cell: u64) -> bool {
        self.members.binary_search(&cell).is_ok()
    }

    pub fn measure(&self) -> Measure {
        Measure::cells(self.members.len() as u64, self.order, self.level)
    }
}

/// `χ_Δ` sampled on the level-`level` grid.
pub fn indicator(interval: &AdicInterval, level: u32) -> Result<StepFunction> {
    let range = interval.cell_range(level)?;
    let n = cells(interval.order(), level)?;
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for v in &mut values[range.start as usize..range.end as usize] {
        *v = Complex64::new(1.0, 0.0);
    }
    StepFunction::new(interval.order(), level, values)
}

/// The kernel equal to `1` off `Δ_m^(k)` and `1 - a^m` on it.
pub fn menshov_kernel(interval: &AdicInterval, level: u32) -> Result<StepFunction> {
    let range = interval.cell_range(level)?;
    let n = cells(interval.order(), level)?;
    let depth = checked_pow(interval.order(), interval.level()).ok_or(Error::Resolution {
        needed: interval.level() as u64,
        max: 0,
    })? as f64;
    let mut values = vec![Complex64::new(1.0, 0.0); n];
    for v in &mut values[range.start as usize..range.end as usize] {
        *v = Complex64::new(1.0 - depth, 0.0);
    }
    StepFunction::new(interval.order(), level, values)
}

/// Exact measure of `{|f - g| > tol}` together with the offending cells.
pub fn disagreement_measure(
    f: &StepFunction,
    g: &StepFunction,
    tol: f64,
) -> Result<(Measure, CellSet)> {
    let (lhs, rhs) = f.reconcile(g)?;
    let members: Vec<u64> = lhs
        .values
        .iter()
        .zip(rhs.values.iter())
        .enumerate()
        .filter(|(_, (x, y))| (*x - *y).norm() > tol)
        .map(|(j, _)| j as u64)
        .collect();
    let set = CellSet::new(lhs.order, lhs.level, members)?;
    Ok((set.measure(), set))
}
