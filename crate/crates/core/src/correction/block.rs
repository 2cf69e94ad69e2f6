//! Kernel blocks `P(x) = γ·χ_Δ(x)·I(a^s x)` kept in closed form.
//!
//! Block shifts grow with every block in a chain, so the index ranges and the
//! grid on which a block is piecewise constant quickly leave machine range.
//! Everything here is computed from `(Δ, γ, ν₀, s)` alone: coefficients as
//! products of two small exact transforms, norms and measures by independence
//! of the digit groups `1..m` and `s+1..s+ν₀`.

use num_complex::Complex64;

use crate::adic::{menshov_kernel, AdicInterval, CellSet, Measure, StepFunction};
use crate::correction::index::WalshIndex;
use crate::error::{Error, Result};
use crate::walsh::{analyze, cell_exponent, AdicPoint, Method, PhaseTable, Spectrum};

/// Spectrum of the level-`ν₀` kernel `1 - a^ν₀·χ_[0, a^-ν₀)`.
pub fn kernel_spectrum(order: u32, nu0: u32) -> Result<Spectrum> {
    let first = AdicInterval::new(order, nu0, 1)?;
    analyze(&menshov_kernel(&first, nu0)?, Method::Fast)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBlock {
    pub interval: AdicInterval,
    pub gamma: Complex64,
    pub nu0: u32,
    pub shift: u64,
}

impl KernelBlock {
    pub fn order(&self) -> u32 {
        self.interval.order()
    }

    fn depth(&self) -> f64 {
        (self.order() as f64).powi(self.nu0 as i32)
    }

    /// Common modulus `|γ||Δ|` of the nonzero coefficients.
    pub fn magnitude(&self) -> f64 {
        self.gamma.norm() * self.interval.measure_f64()
    }

    pub fn l1_norm(&self) -> f64 {
        2.0 * self.magnitude() * (1.0 - 1.0 / self.depth())
    }

    /// `‖P‖₂ = |γ|·sqrt(|Δ|(a^ν₀ - 1))`; bounds the `L¹` norm of any sub-sum.
    pub fn l2_norm(&self) -> f64 {
        self.gamma.norm() * (self.interval.measure_f64() * (self.depth() - 1.0)).sqrt()
    }

    /// `|E_ν| = |Δ|(1 - a^-ν₀)`.
    pub fn kept_measure(&self) -> Measure {
        self.interval
            .measure()
            .mul(&(Measure::one() - Measure::inv_pow(self.order(), self.nu0)))
    }

    /// `|Δ \ E_ν| = |Δ|·a^-ν₀`.
    pub fn lost_measure(&self) -> Measure {
        self.interval.measure().mul(&Measure::inv_pow(self.order(), self.nu0))
    }

    /// Number of nonzero coefficients, `(a^ν₀ - 1)·a^m`.
    pub fn term_count(&self) -> f64 {
        (self.depth() - 1.0) * (self.order() as f64).powi(self.interval.level() as i32)
    }

    /// `a^s`.
    pub fn first_index(&self) -> WalshIndex {
        WalshIndex::from_digits(self.order(), vec![(self.shift, 1)]).expect("single digit")
    }

    /// `N = a^(s+ν₀) + a^m - a^s - 1`.
    pub fn last_index(&self) -> WalshIndex {
        let top = self.order() - 1;
        let m = self.interval.level() as u64;
        let mut digits: Vec<(u64, u32)> = (0..m).map(|p| (p, top)).collect();
        digits.extend((self.shift..self.shift + self.nu0 as u64).map(|p| (p, top)));
        WalshIndex::from_digits(self.order(), digits).expect("distinct positions since s >= m")
    }

    /// Highest digit position of [`KernelBlock::last_index`].
    pub fn last_log(&self) -> u64 {
        self.shift + self.nu0 as u64 - 1
    }

    /// Coefficient of `ψ_(j·a^s + i)`, `1 <= j < a^ν₀`, `0 <= i < a^m`: the
    /// transform of `γχ_Δ` at `i` times the kernel transform at `j`.
    pub fn coefficient(&self, kernel: &Spectrum, j: u64, i: u64) -> Complex64 {
        let m = self.interval.level();
        let table = PhaseTable::new(self.order());
        let a_i = table.conj(cell_exponent(self.order(), m, i, self.interval.cell()))
            * self.interval.measure_f64();
        self.gamma * a_i * kernel.get(j)
    }

    /// All `(index, coefficient)` pairs in increasing index order.
    pub fn terms<'a>(
        &'a self,
        kernel: &'a Spectrum,
    ) -> impl Iterator<Item = (WalshIndex, Complex64)> + 'a {
        let a = self.order() as u64;
        let width = a.pow(self.interval.level());
        (1..a.pow(self.nu0)).flat_map(move |j| {
            (0..width).map(move |i| {
                (
                    WalshIndex::compose(self.order(), j, self.shift, i),
                    self.coefficient(kernel, j, i),
                )
            })
        })
    }

    /// `true` on `Δ` minus the points whose digits `s+1 … s+ν₀` all vanish.
    pub fn kept_contains(&self, x: &AdicPoint) -> bool {
        self.interval_contains(x) && !self.kernel_low(x)
    }

    fn interval_contains(&self, x: &AdicPoint) -> bool {
        x.cell(self.interval.level()) == self.interval.cell()
    }

    fn kernel_low(&self, x: &AdicPoint) -> bool {
        let pos: Vec<u64> = (self.shift + 1..=self.shift + self.nu0 as u64).collect();
        x.digits_at(&pos).iter().all(|&d| d == 0)
    }

    pub fn value_at(&self, x: &AdicPoint) -> Complex64 {
        if !self.interval_contains(x) {
            return Complex64::new(0.0, 0.0);
        }
        if self.kernel_low(x) {
            self.gamma * (1.0 - self.depth())
        } else {
            self.gamma
        }
    }

    /// Grid level on which the block is exactly a step function.
    pub fn exact_level(&self) -> u64 {
        self.shift + self.nu0 as u64
    }

    /// Adds the block to `values`, a level-`level` grid with `level >= s + ν₀`.
    pub fn render_into(&self, values: &mut [Complex64], level: u32) -> Result<()> {
        if (level as u64) < self.exact_level() {
            return Err(Error::Resolution {
                needed: self.exact_level(),
                max: level,
            });
        }
        let a = self.order() as u64;
        let range = self.interval.cell_range(level)?;
        let below = a.pow(level - self.exact_level() as u32);
        let window = a.pow(self.nu0);
        let low = self.gamma * (1.0 - self.depth());
        for c in range {
            let v = &mut values[c as usize];
            *v += if (c / below).is_multiple_of(window) { low } else { self.gamma };
        }
        Ok(())
    }
}

/// `g = base + Σ blocks`, with `base` a step function on a coarse grid.
#[derive(Debug, Clone)]
pub struct CorrectedFunction {
    pub base: StepFunction,
    pub blocks: Vec<KernelBlock>,
}

impl CorrectedFunction {
    pub fn order(&self) -> u32 {
        self.base.order()
    }

    /// Finest grid needed for an exact dense picture.
    pub fn exact_level(&self) -> u64 {
        self.blocks
            .iter()
            .map(|b| b.exact_level())
            .max()
            .unwrap_or(0)
            .max(self.base.level() as u64)
    }

    pub fn render(&self, level: u32) -> Result<StepFunction> {
        let mut values = self.base.refine(level)?.into_values();
        for b in &self.blocks {
            b.render_into(&mut values, level)?;
        }
        StepFunction::new(self.order(), level, values)
    }

    pub fn value_at(&self, x: &AdicPoint) -> Complex64 {
        let base = self.base.values()[x.cell(self.base.level()) as usize];
        self.blocks.iter().fold(base, |acc, b| acc + b.value_at(x))
    }

    /// Pairwise-disjoint block intervals, each inside one base cell.
    pub fn blocks_disjoint(&self) -> bool {
        let mut spans: Vec<(u128, u128)> = Vec::with_capacity(self.blocks.len());
        let top = self.blocks.iter().map(|b| b.interval.level()).max().unwrap_or(0);
        let a = self.order() as u128;
        for b in &self.blocks {
            let scale = a.pow(top - b.interval.level());
            let start = b.interval.cell() as u128 * scale;
            spans.push((start, start + scale));
        }
        spans.sort_unstable();
        spans.windows(2).all(|w| w[0].1 <= w[1].0)
            && self.blocks.iter().all(|b| b.interval.level() >= self.base.level())
    }

    /// Exact `‖g‖₁` for disjoint blocks: on each `Δ` the base is a constant
    /// `b` and the kernel factor is independent of the position inside `Δ`.
    pub fn l1_norm(&self) -> Result<f64> {
        if !self.blocks_disjoint() {
            return Err(Error::InvalidArgument("overlapping blocks".into()));
        }
        let base_level = self.base.level();
        let a = self.order() as u64;
        let mut covered = vec![Measure::zero(); self.base.len()];
        let mut total = 0.0;
        for blk in &self.blocks {
            let depth = blk.depth();
            let cell = blk.interval.cell() / a.pow(blk.interval.level() - base_level);
            let b = self.base.values()[cell as usize];
            let d = blk.interval.measure_f64();
            total += d
                * ((1.0 - 1.0 / depth) * (b + blk.gamma).norm()
                    + (b + blk.gamma * (1.0 - depth)).norm() / depth);
            covered[cell as usize] = &covered[cell as usize] + &blk.interval.measure();
        }
        let cell = Measure::inv_pow(self.order(), base_level);
        for (c, v) in self.base.values().iter().enumerate() {
            let free = cell.clone() - covered[c].clone();
            total += free.to_f64() * v.norm();
        }
        Ok(total)
    }
}

/// `E = ∪ E_ν ∪ (listed full cells)`.
#[derive(Debug, Clone)]
pub struct KeptSet {
    pub pieces: Vec<KernelBlock>,
    pub full: CellSet,
}

impl KeptSet {
    pub fn measure(&self) -> Measure {
        self.pieces
            .iter()
            .map(|b| b.kept_measure())
            .sum::<Measure>()
            + self.full.measure()
    }

    pub fn contains(&self, x: &AdicPoint) -> bool {
        self.full.contains(x.cell(self.full.level)) || self.pieces.iter().any(|b| b.kept_contains(x))
    }
}
