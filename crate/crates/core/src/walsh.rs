//! Rademacher and generalized Walsh functions of order `a`, and the
//! analysis/synthesis transforms between step functions and spectra.
//!
//! Digit convention: a cell `c` of the level-`J` grid has fractional a-adic
//! digits `ξ_1 … ξ_J` (most significant first), and a spectral index
//! `n = Σ β_j a^j` gives `ψ_n = ω^(Σ β_j ξ_{j+1})`. Cells are kept in natural
//! order; the fast transform undoes the resulting digit reversal at the end.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::adic::{cells, check_order, checked_pow, StepFunction};
use crate::error::{Error, Result};

/// Levels above this are refused by the quadratic evaluator.
pub const NAIVE_MAX_LEVEL: u32 = 8;

/// `ω_a^exponent` with the exponent kept as an exact residue mod `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitPhase {
    order: u32,
    exponent: u32,
}

impl UnitPhase {
    pub fn new(order: u32, exponent: u64) -> Self {
        UnitPhase {
            order,
            exponent: (exponent % order as u64) as u32,
        }
    }

    pub fn one(order: u32) -> Self {
        UnitPhase { order, exponent: 0 }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: UnitPhase) -> UnitPhase {
        debug_assert_eq!(self.order, other.order);
        UnitPhase::new(self.order, self.exponent as u64 + other.exponent as u64)
    }

    pub fn pow(self, k: u64) -> UnitPhase {
        UnitPhase::new(
            self.order,
            (self.exponent as u64 * (k % self.order as u64)) % self.order as u64,
        )
    }

    pub fn conj(self) -> UnitPhase {
        UnitPhase::new(self.order, (self.order - self.exponent) as u64)
    }

    pub fn value(&self) -> Complex64 {
        root_of_unity(self.order, self.exponent)
    }
}

impl fmt::Display for UnitPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω_{}^{}", self.order, self.exponent)
    }
}

/// `e^(2πi k/a)`, exact at the quarter turns.
pub fn root_of_unity(order: u32, k: u32) -> Complex64 {
    let k = k % order;
    if (4 * k).is_multiple_of(order) {
        return match 4 * k / order {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * std::f64::consts::PI * k as f64 / order as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// The `a` powers of `ω_a`, computed once.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    order: u32,
    table: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(order: u32) -> Self {
        PhaseTable {
            order,
            table: (0..order).map(|k| root_of_unity(order, k)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, exponent: u64) -> Complex64 {
        self.table[(exponent % self.order as u64) as usize]
    }

    #[inline]
    pub fn conj(&self, exponent: u64) -> Complex64 {
        let a = self.order as u64;
        self.table[((a - exponent % a) % a) as usize]
    }
}

/// A point of `[0, 1)` given exactly as a rational number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdicPoint {
    order: u32,
    value: BigRational,
}

impl AdicPoint {
    /// `p / q` reduced mod 1.
    pub fn from_ratio(order: u32, p: i64, q: u64) -> Result<Self> {
        check_order(order)?;
        if q == 0 {
            return Err(Error::Precision("zero denominator".into()));
        }
        Ok(Self::reduce(
            order,
            BigRational::new(BigInt::from(p), BigInt::from(q)),
        ))
    }

    /// The exact binary value of a finite double, reduced mod 1.
    pub fn from_f64(order: u32, x: f64) -> Result<Self> {
        check_order(order)?;
        let value = BigRational::from_float(x)
            .ok_or_else(|| Error::Precision(format!("{x} is not a finite number")))?;
        Ok(Self::reduce(order, value))
    }

    /// `0.ξ_1 ξ_2 …` in base `a`.
    pub fn from_digits(order: u32, digits: &[u32]) -> Result<Self> {
        check_order(order)?;
        let mut num = BigInt::zero();
        for &d in digits {
            if d >= order {
                return Err(Error::InvalidArgument(format!("digit {d} not below {order}")));
            }
            num = num * order + d;
        }
        let den = BigInt::from(order).pow(digits.len() as u32);
        Ok(Self::reduce(order, BigRational::new(num, den)))
    }

    /// Left endpoint of cell `cell` of the level-`level` grid.
    pub fn cell_start(order: u32, level: u32, cell: u64) -> Result<Self> {
        check_order(order)?;
        let den = BigInt::from(order).pow(level);
        Ok(Self::reduce(
            order,
            BigRational::new(BigInt::from(cell), den),
        ))
    }

    fn reduce(order: u32, value: BigRational) -> Self {
        let floor = value.floor();
        AdicPoint {
            order,
            value: value - floor,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    /// `a^s x mod 1`.
    pub fn dilate(&self, s: u32) -> AdicPoint {
        let scaled = &self.value * BigRational::from_integer(BigInt::from(self.order).pow(s));
        Self::reduce(self.order, scaled)
    }

    /// The first `count` a-adic digits `ξ_1 … ξ_count`.
    pub fn digits(&self, count: usize) -> Vec<u32> {
        let den = self.value.denom().clone();
        let mut rem = self.value.numer().clone();
        let a = BigInt::from(self.order);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            rem *= &a;
            let (d, r) = rem.div_rem(&den);
            out.push(d.to_u32().unwrap_or(0));
            rem = r;
        }
        out
    }

    /// Digit `ξ_t`, `t >= 1`.
    pub fn digit(&self, t: usize) -> u32 {
        if t == 0 {
            return 0;
        }
        self.digits(t)[t - 1]
    }

    /// Digits `ξ_{t}` for every position listed (1-based), without
    /// materialising the gaps between far-apart positions.
    pub fn digits_at(&self, positions: &[u64]) -> Vec<u32> {
        let den = self.value.denom().clone();
        let a = BigUint::from(self.order);
        let num = self.value.numer().abs().to_biguint().unwrap_or_default();
        let den_u = den.abs().to_biguint().unwrap_or_default();
        positions
            .iter()
            .map(|&t| {
                if t == 0 {
                    return 0;
                }
                // ξ_t = floor(a^t x) mod a
                let shifted = (&num * a.pow(t as u32)) / &den_u;
                (shifted % &a).to_u32().unwrap_or(0)
            })
            .collect()
    }

    /// Zero-based cell holding the point on the level-`level` grid.
    pub fn cell(&self, level: u32) -> u64 {
        self.digits(level as usize)
            .iter()
            .fold(0u64, |acc, &d| acc * self.order as u64 + d as u64)
    }
}

/// `φ_n(x) = ω^(ξ_{n+1})`.
pub fn rademacher_eval(order: u32, n: u32, x: &AdicPoint) -> Result<UnitPhase> {
    check_order(order)?;
    if x.order() != order {
        return Err(Error::OrderMismatch(order, x.order()));
    }
    Ok(UnitPhase::new(order, x.digit(n as usize + 1) as u64))
}

/// `ψ_n(x) = Π φ_j(x)^(β_j)` with `n = Σ β_j a^j`.
pub fn walsh_eval(order: u32, n: u64, x: &AdicPoint) -> Result<UnitPhase> {
    check_order(order)?;
    if x.order() != order {
        return Err(Error::OrderMismatch(order, x.order()));
    }
    let betas = base_digits(order, n);
    let xi = x.digits(betas.len());
    let exponent: u64 = betas
        .iter()
        .zip(xi.iter())
        .map(|(&b, &d)| b as u64 * d as u64)
        .sum();
    Ok(UnitPhase::new(order, exponent))
}

/// Base-`a` digits of `n`, least significant first.
pub fn base_digits(order: u32, mut n: u64) -> Vec<u32> {
    let a = order as u64;
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % a) as u32);
        n /= a;
    }
    out
}

/// Exponent of `ψ_n` on cell `cell` of the level-`level` grid (integer, not reduced).
#[inline]
pub fn cell_exponent(order: u32, level: u32, n: u64, cell: u64) -> u64 {
    let a = order as u64;
    let mut n = n;
    let mut acc = 0u64;
    let mut j = 0u32;
    while n > 0 && j < level {
        let beta = n % a;
        if beta != 0 {
            let stride = a.pow(level - 1 - j);
            let xi = (cell / stride) % a;
            acc += beta * xi;
        }
        n /= a;
        j += 1;
    }
    acc
}

/// `values += c·ψ_n` on every cell of the level-`level` grid.
pub fn accumulate_term(
    values: &mut [Complex64],
    table: &PhaseTable,
    level: u32,
    n: u64,
    c: Complex64,
) {
    let a = table.order as u64;
    let mut exps = vec![0u64; values.len()];
    let mut rest = n;
    let mut j = 0u32;
    while rest > 0 && j < level {
        let beta = rest % a;
        if beta != 0 {
            let stride = a.pow(level - 1 - j) as usize;
            for (cell, e) in exps.iter_mut().enumerate() {
                *e += beta * ((cell / stride) as u64 % a);
            }
        }
        rest /= a;
        j += 1;
    }
    for (v, e) in values.iter_mut().zip(exps) {
        *v += c * table.get(e);
    }
}

/// Fourier–Walsh coefficients `c_n`, `0 <= n < a^J`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    order: u32,
    source_level: u32,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(order: u32, source_level: u32, coefficients: Vec<Complex64>) -> Result<Self> {
        check_order(order)?;
        let n = cells(order, source_level)?;
        if coefficients.len() != n {
            return Err(Error::InvalidArgument(format!(
                "spectrum of level {source_level} needs {n} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(Spectrum {
            order,
            source_level,
            coefficients,
        })
    }

    /// Build from sparse `(n, c_n)` pairs; every index must be below `a^J`.
    pub fn from_pairs<I>(order: u32, source_level: u32, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        check_order(order)?;
        let n = cells(order, source_level)?;
        let mut coefficients = vec![Complex64::new(0.0, 0.0); n];
        for (idx, c) in pairs {
            if idx >= n as u64 {
                return Err(Error::Resolution {
                    needed: level_for_index(order, idx) as u64,
                    max: source_level,
                });
            }
            coefficients[idx as usize] += c;
        }
        Ok(Spectrum {
            order,
            source_level,
            coefficients,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn source_level(&self) -> u32 {
        self.source_level
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn get(&self, n: u64) -> Complex64 {
        self.coefficients
            .get(n as usize)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Indices whose coefficient magnitude exceeds `hard_zero`.
    pub fn support(&self, hard_zero: f64) -> Vec<u64> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > hard_zero)
            .map(|(n, _)| n as u64)
            .collect()
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest index with a nonzero coefficient.
    pub fn max_index(&self) -> Option<u64> {
        self.coefficients
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
            .map(|n| n as u64)
    }
}

/// Smallest level `J` with `n < a^J`.
pub fn level_for_index(order: u32, n: u64) -> u32 {
    base_digits(order, n).len() as u32
}

/// How [`analyze`] evaluates the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Evaluates every `ψ_n` on every cell; quadratic.
    Naive,
    /// `J` stages of a-point butterflies along the digit axes.
    Fast,
}

/// `c_n = a^(-J) Σ_cells f(cell) conj(ψ_n(cell))` for all `n < a^J`.
pub fn analyze(f: &StepFunction, method: Method) -> Result<Spectrum> {
    let coefficients = match method {
        Method::Naive => {
            if f.level() > NAIVE_MAX_LEVEL {
                return Err(Error::NaiveTooLarge {
                    level: f.level(),
                    limit: NAIVE_MAX_LEVEL,
                });
            }
            let n = f.len() as u64;
            (0..n).map(|k| naive_coefficient(f, k)).collect()
        }
        Method::Fast => {
            let mut work = f.values().to_vec();
            butterfly_stages(&mut work, f.order(), f.level(), false);
            let rev = digit_reversal(f.order(), f.level());
            let scale = 1.0 / work.len() as f64;
            rev.iter().map(|&p| work[p as usize] * scale).collect()
        }
    };
    Spectrum::new(f.order(), f.level(), coefficients)
}

/// One coefficient by direct summation over the cells.
pub fn naive_coefficient(f: &StepFunction, n: u64) -> Complex64 {
    let table = PhaseTable::new(f.order());
    let sum: Complex64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(cell, &v)| v * table.conj(cell_exponent(f.order(), f.level(), n, cell as u64)))
        .sum();
    sum / f.len() as f64
}

/// `Σ c_n ψ_n` on every cell of the level-`level` grid.
pub fn synthesize(spectrum: &Spectrum, level: u32) -> Result<StepFunction> {
    let order = spectrum.order();
    let n = cells(order, level)?;
    if let Some(top) = spectrum.max_index() {
        if top >= n as u64 {
            return Err(Error::Resolution {
                needed: level_for_index(order, top) as u64,
                max: level,
            });
        }
    }
    let rev = digit_reversal(order, level);
    let mut work = vec![Complex64::new(0.0, 0.0); n];
    for (idx, &p) in rev.iter().enumerate() {
        work[p as usize] = spectrum.get(idx as u64);
    }
    butterfly_stages(&mut work, order, level, true);
    StepFunction::new(order, level, work)
}

/// `rev[n]` = the level-`level` base-`a` digit reversal of `n`.
pub fn digit_reversal(order: u32, level: u32) -> Vec<u64> {
    let n = checked_pow(order, level).unwrap_or(0) as usize;
    let a = order as u64;
    let top = if level == 0 { 0 } else { a.pow(level - 1) };
    let mut rev = vec![0u64; n];
    for k in 1..n {
        let q = k / order as usize;
        rev[k] = rev[q] / a + (k as u64 % a) * top;
    }
    rev
}

/// In-place a-point DFTs along each digit axis. `inverse` selects `ω^(+bt)`.
fn butterfly_stages(data: &mut [Complex64], order: u32, level: u32, inverse: bool) {
    let a = order as usize;
    let table = PhaseTable::new(order);
    // twiddles[b * a + t] = ω^(±bt)
    let twiddles: Vec<Complex64> = (0..a * a)
        .map(|k| {
            let e = ((k / a) * (k % a)) as u64;
            if inverse {
                table.get(e)
            } else {
                table.conj(e)
            }
        })
        .collect();
    let mut stride = 1usize;
    for _ in 0..level {
        let block = stride * a;
        if a == 2 {
            for base in (0..data.len()).step_by(block) {
                let (lo, hi) = data[base..base + block].split_at_mut(stride);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (u, v) = (*x, *y);
                    *x = u + v;
                    *y = u - v;
                }
            }
        } else {
            // out_b = Σ_t w(b, t) x_t, swept over contiguous runs of length stride
            let mut out = vec![Complex64::new(0.0, 0.0); block];
            for base in (0..data.len()).step_by(block) {
                let chunk = &mut data[base..base + block];
                for (b, row) in twiddles.chunks_exact(a).enumerate() {
                    let dst = &mut out[b * stride..(b + 1) * stride];
                    dst.copy_from_slice(&chunk[..stride]);
                    for (t, &w) in row.iter().enumerate().skip(1) {
                        for (d, &x) in dst.iter_mut().zip(&chunk[t * stride..(t + 1) * stride]) {
                            *d += x * w;
                        }
                    }
                }
                chunk.copy_from_slice(&out);
            }
        }
        stride = block;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adic::{indicator, menshov_kernel, AdicInterval};

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn rademacher_examples() {
        let x = AdicPoint::from_f64(2, 0.75).unwrap();
        assert_eq!(rademacher_eval(2, 0, &x).unwrap().exponent(), 1);
        assert_eq!(rademacher_eval(2, 0, &x).unwrap().value(), Complex64::new(-1.0, 0.0));
        let x = AdicPoint::from_ratio(4, 3, 10).unwrap();
        let phi = rademacher_eval(4, 0, &x).unwrap();
        assert_eq!(phi.value(), Complex64::new(0.0, 1.0));
        let x = AdicPoint::from_ratio(3, 4, 9).unwrap();
        assert_eq!(rademacher_eval(3, 1, &x).unwrap().exponent(), 1);
    }

    #[test]
    fn walsh_examples() {
        for a in 2..6 {
            let x = AdicPoint::from_ratio(a, 7, 13).unwrap();
            assert_eq!(walsh_eval(a, 0, &x).unwrap().exponent(), 0);
        }
        let x = AdicPoint::from_f64(2, 0.25).unwrap();
        assert_eq!(walsh_eval(2, 3, &x).unwrap().exponent(), 1);
        let x = AdicPoint::from_ratio(3, 4, 9).unwrap();
        assert_eq!(walsh_eval(3, 5, &x).unwrap().exponent(), 0);
    }

    #[test]
    fn mismatched_point_order() {
        let x = AdicPoint::from_ratio(3, 1, 3).unwrap();
        assert!(matches!(walsh_eval(2, 1, &x), Err(Error::OrderMismatch(2, 3))));
        assert!(AdicPoint::from_f64(2, f64::NAN).is_err());
    }

    #[test]
    fn point_digits() {
        let x = AdicPoint::from_ratio(3, 4, 9).unwrap();
        assert_eq!(x.digits(3), vec![1, 1, 0]);
        assert_eq!(x.digits_at(&[1, 2, 3]), vec![1, 1, 0]);
        assert_eq!(x.cell(2), 4);
        let y = AdicPoint::from_ratio(2, -1, 4).unwrap();
        assert_eq!(y.digits(2), vec![1, 1]);
        assert_eq!(x.dilate(1).digits(1), vec![1]);
    }

    #[test]
    fn cell_exponent_matches_point_evaluation() {
        for a in 2..=4u32 {
            let level = 3;
            let n_cells = a.pow(level) as u64;
            for n in 0..n_cells {
                for c in 0..n_cells {
                    let x = AdicPoint::cell_start(a, level, c).unwrap();
                    let e = walsh_eval(a, n, &x).unwrap().exponent() as u64;
                    assert_eq!(cell_exponent(a, level, n, c) % a as u64, e);
                }
            }
        }
    }

    #[test]
    fn root_of_unity_sums() {
        for a in 2..=7u32 {
            for m in 0..3 * a {
                let s: Complex64 = (0..a).map(|k| root_of_unity(a, (k * m) % a)).sum();
                let expected = if m % a == 0 { a as f64 } else { 0.0 };
                assert!((s - Complex64::new(expected, 0.0)).norm() < 1e-12, "a={a} m={m}");
            }
        }
    }

    #[test]
    fn analyze_examples() {
        let chi = indicator(&AdicInterval::new(2, 1, 1).unwrap(), 1).unwrap();
        for method in [Method::Naive, Method::Fast] {
            let s = analyze(&chi, method).unwrap();
            assert!(close(s.get(0), Complex64::new(0.5, 0.0)));
            assert!(close(s.get(1), Complex64::new(0.5, 0.0)));
        }
        let one = StepFunction::constant(3, 2, Complex64::new(1.0, 0.0)).unwrap();
        let s = analyze(&one, Method::Fast).unwrap();
        assert!(close(s.get(0), Complex64::new(1.0, 0.0)));
        assert!(s.coefficients()[1..].iter().all(|c| c.norm() < 1e-15));
        let k = menshov_kernel(&AdicInterval::new(2, 1, 1).unwrap(), 1).unwrap();
        let s = analyze(&k, Method::Fast).unwrap();
        assert!(close(s.get(0), Complex64::new(0.0, 0.0)));
        assert!(close(s.get(1), Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn naive_is_capped() {
        let f = StepFunction::zero(2, NAIVE_MAX_LEVEL + 1).unwrap();
        assert!(matches!(analyze(&f, Method::Naive), Err(Error::NaiveTooLarge { .. })));
    }

    #[test]
    fn synthesize_examples() {
        let s = Spectrum::from_pairs(3, 0, [(0, Complex64::new(1.0, 0.0))]).unwrap();
        let f = synthesize(&s, 2).unwrap();
        assert!(f.values().iter().all(|v| close(*v, Complex64::new(1.0, 0.0))));
        let s = Spectrum::from_pairs(2, 1, [(0, Complex64::new(0.5, 0.0)), (1, Complex64::new(0.5, 0.0))])
            .unwrap();
        let f = synthesize(&s, 1).unwrap();
        assert!(close(f.values()[0], Complex64::new(1.0, 0.0)));
        assert!(close(f.values()[1], Complex64::new(0.0, 0.0)));
        let s = Spectrum::from_pairs(2, 3, [(5, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(synthesize(&s, 2), Err(Error::Resolution { .. })));
        assert!(Spectrum::from_pairs(2, 1, [(2, Complex64::new(1.0, 0.0))]).is_err());
    }

    #[test]
    fn digit_reversal_is_involution() {
        for a in 2..=5u32 {
            for level in 0..=4 {
                let rev = digit_reversal(a, level);
                for (k, &r) in rev.iter().enumerate() {
                    assert_eq!(rev[r as usize], k as u64);
                }
            }
        }
    }
}
