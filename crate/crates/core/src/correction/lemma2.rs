//! Whole-function corrector: `g = P + f - φ` where `P` is a chain of kernel
//! blocks, one per piece of the step approximation `φ`, with coefficient
//! moduli non-increasing along the series.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::Value;

use crate::adic::{AdicInterval, CellSet, Config, Measure, Norm, StepFunction};
use crate::correction::block::{kernel_spectrum, CorrectedFunction, KeptSet, KernelBlock};
use crate::correction::certificate::{Certificate, Conclusion, Relation};
use crate::correction::index::WalshIndex;
use crate::correction::lemma1::{nu0_for, EQ_TOL};
use crate::correction::step::{step_approximate, StepApproximation};
use crate::error::{Error, Result};
use crate::io;

/// Relative slack allowed when comparing block moduli computed in floating point.
pub const MAGNITUDE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Lemma2Result {
    pub eps: f64,
    pub n0: WalshIndex,
    pub nu0: u32,
    pub step: StepApproximation,
    /// `g`, with its blocks in series order.
    pub g: CorrectedFunction,
    pub kept: KeptSet,
    /// First index free for a following construction.
    pub next_n0: WalshIndex,
    pub certificate: Certificate,
}

impl Lemma2Result {
    pub fn blocks(&self) -> &[KernelBlock] {
        &self.g.blocks
    }
}

pub fn lemma2_construct(
    f: &StepFunction,
    n0: &WalshIndex,
    eps: f64,
    config: &Config,
) -> Result<Lemma2Result> {
    lemma2_with_cap(f, n0, eps, None, config)
}

/// As [`lemma2_construct`], additionally keeping every block modulus at or
/// below `cap` so that the series can continue a previous one.
pub fn lemma2_with_cap(
    f: &StepFunction,
    n0: &WalshIndex,
    eps: f64,
    cap: Option<f64>,
    config: &Config,
) -> Result<Lemma2Result> {
    if f.order() != config.order || n0.order() != config.order {
        return Err(Error::OrderMismatch(config.order, f.order()));
    }
    if n0 <= &WalshIndex::from_u64(f.order(), 1) {
        return Err(Error::N0TooSmall(n0.to_u64().unwrap_or(0)));
    }
    let nu0 = nu0_for(f.order(), eps)?;
    let step = step_approximate(f, eps, cap, config)?;
    let blocks = chain(&step, n0, nu0);
    let base = residual_base(f, &blocks)?;
    let next_n0 = blocks
        .last()
        .map(|b| b.last_index().add_one())
        .unwrap_or_else(|| n0.clone());
    let g = CorrectedFunction { base, blocks };
    let kept = KeptSet {
        pieces: g.blocks.clone(),
        full: step.uncovered.clone(),
    };
    let mut certificate = certify(f, eps, n0, &g, &step.uncovered)?;
    certificate.data = certificate_data(f, &g, &step.uncovered);
    Ok(Lemma2Result {
        eps,
        n0: n0.clone(),
        nu0,
        step,
        g,
        kept,
        next_n0,
        certificate,
    })
}

/// Block `ν` starts at `a^s` with `s = ⌊log_a N_(ν-1)⌋ + m_ν`.
fn chain(step: &StepApproximation, n0: &WalshIndex, nu0: u32) -> Vec<KernelBlock> {
    let mut log = n0.floor_log().unwrap_or(0);
    let mut out = Vec::with_capacity(step.len());
    for (d, g) in step.intervals.iter().zip(&step.gammas) {
        let m = d.level() as u64;
        let shift = log + m;
        out.push(KernelBlock {
            interval: *d,
            gamma: *g,
            nu0,
            shift,
        });
        // N + 1 = (a^ν₀ - 1)·a^s + a^m
        log = shift + nu0 as u64 - 1 + u64::from(m == shift);
    }
    out
}

/// `f - φ` as a step function on the grid of `f`.
fn residual_base(f: &StepFunction, blocks: &[KernelBlock]) -> Result<StepFunction> {
    let a = f.order() as u64;
    let mut values = f.values().to_vec();
    let mut seen = vec![None::<Complex64>; f.len()];
    for b in blocks {
        let cell = (b.interval.cell() / a.pow(b.interval.level() - f.level())) as usize;
        match seen[cell] {
            None => {
                values[cell] -= b.gamma;
                seen[cell] = Some(b.gamma);
            }
            Some(g) if g == b.gamma => {}
            Some(_) => {
                return Err(Error::InvalidArgument(
                    "blocks inside one cell must share a value".into(),
                ))
            }
        }
    }
    StepFunction::new(f.order(), f.level(), values)
}

/// Smallest and largest `|B_j|`, `1 <= j < a^ν₀`, of the kernel transform.
pub fn kernel_moduli(order: u32, nu0: u32) -> Result<(f64, f64)> {
    let spec = kernel_spectrum(order, nu0)?;
    let moduli = spec.coefficients()[1..].iter().map(|c| c.norm());
    Ok(moduli.fold((f64::INFINITY, 0.0), |(lo, hi), x| (lo.min(x), hi.max(x))))
}

/// `Σ |E_ν| + |uncovered|`, grouped by level so the sum stays cheap.
pub fn kept_measure(blocks: &[KernelBlock], uncovered: &CellSet) -> Measure {
    let mut groups: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for b in blocks {
        *groups.entry((b.interval.level(), b.nu0)).or_default() += 1;
    }
    let order = uncovered.order;
    groups
        .into_iter()
        .map(|((level, nu0), count)| {
            Measure::cells(count, order, level)
                .mul(&(Measure::one() - Measure::inv_pow(order, nu0)))
        })
        .sum::<Measure>()
        + uncovered.measure()
}

/// Running upper bound on `‖Σ_(k<=M) c_k ψ_(n_k)‖₁` over all prefixes: whole
/// earlier blocks by their exact norms, the open block by its `L²` norm.
pub fn prefix_bound(blocks: &[KernelBlock]) -> f64 {
    let mut done = 0.0;
    let mut best = 0.0f64;
    for b in blocks {
        best = best.max(done + b.l2_norm());
        done += b.l1_norm();
    }
    best.max(done)
}

/// Checks the six conclusions (plus the properties of `φ`) from `f`, the
/// blocks and the base alone.
pub fn certify(
    f: &StepFunction,
    eps: f64,
    n0: &WalshIndex,
    g: &CorrectedFunction,
    uncovered: &CellSet,
) -> Result<Certificate> {
    let order = f.order();
    let a = order as u64;
    let norm_f = f.norm(Norm::L1);
    let scale = f.norm(Norm::Sup).max(f64::MIN_POSITIVE);
    let blocks = &g.blocks;
    let mut cert = Certificate::new("lemma2");

    // 1) |E| > 1 - ε
    let e = kept_measure(blocks, uncovered);
    let bound = Measure::one() - Measure::from_f64(eps)?;
    cert.push(Conclusion::exact("kept_measure", e.to_f64(), Relation::Greater, bound.to_f64(), e > bound));

    // 2) f = g on E
    let cell_of = |b: &KernelBlock| (b.interval.cell() / a.pow(b.interval.level() - f.level())) as usize;
    let on_pieces = blocks
        .iter()
        .map(|b| {
            let c = cell_of(b);
            (g.base.values()[c] + b.gamma - f.values()[c]).norm()
        })
        .fold(0.0, f64::max);
    let on_full = uncovered
        .members()
        .iter()
        .map(|&c| (g.base.values()[c as usize] - f.values()[c as usize]).norm())
        .fold(0.0, f64::max);
    cert.push(Conclusion::check(
        "equals_f_on_kept_set",
        on_pieces.max(on_full) / scale,
        Relation::LessEq,
        EQ_TOL,
    ));

    // 3) ½‖f‖₁ < ‖g‖₁ < 3‖f‖₁
    let norm_g = g.l1_norm()?;
    cert.push(Conclusion::check("g_l1_lower", norm_g, Relation::Greater, 0.5 * norm_f));
    cert.push(Conclusion::check("g_l1_upper", norm_g, Relation::Less, 3.0 * norm_f));

    // 4) ‖P - g‖₁ = ‖f - φ‖₁ < ε
    let p_minus_g = g.base.norm(Norm::L1);
    cert.push(Conclusion::check("p_minus_g_l1", p_minus_g, Relation::Less, eps));
    let f_minus_phi = {
        let mut covered = vec![Measure::zero(); f.len()];
        let mut total = 0.0;
        for b in blocks {
            let c = cell_of(b);
            total += (f.values()[c] - b.gamma).norm() * b.interval.measure_f64();
            covered[c] = &covered[c] + &b.interval.measure();
        }
        let cell = Measure::inv_pow(order, f.level());
        for (c, v) in f.values().iter().enumerate() {
            total += (cell.clone() - covered[c].clone()).to_f64() * v.norm();
        }
        total
    };
    cert.push(Conclusion::close("p_minus_g_identity", p_minus_g, f_minus_phi, EQ_TOL));

    // 5) ε > |c_k| >= |c_(k+1)| > 0
    let mut moduli: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
    for b in blocks {
        if let std::collections::btree_map::Entry::Vacant(v) = moduli.entry(b.nu0) {
            v.insert(kernel_moduli(order, b.nu0)?);
        }
    }
    let ranges: Vec<(f64, f64)> = blocks
        .iter()
        .map(|b| {
            let (lo, hi) = moduli[&b.nu0];
            let w = b.gamma.norm() * b.interval.measure_f64();
            (w * lo, w * hi)
        })
        .collect();
    let top = ranges.iter().map(|r| r.1).fold(0.0, f64::max);
    let bottom = ranges.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    cert.push(Conclusion::check("coefficients_below_eps", top, Relation::Less, eps));
    cert.push(Conclusion::check("coefficients_positive", bottom, Relation::Greater, 0.0));
    let climb = ranges
        .windows(2)
        .map(|w| (w[1].1 - w[0].0) / w[0].0)
        .chain(ranges.iter().map(|r| (r.1 - r.0) / r.0))
        .fold(0.0, f64::max);
    cert.push(Conclusion::check("coefficients_non_increasing", climb, Relation::LessEq, MAGNITUDE_REL_TOL));
    let product_dev = blocks
        .iter()
        .zip(&ranges)
        .map(|(b, r)| (r.1 - b.magnitude()).abs().max((r.0 - b.magnitude()).abs()) / b.magnitude())
        .fold(0.0, f64::max);
    cert.push(Conclusion::check("block_modulus_is_product", product_dev, Relation::LessEq, 1e-9));

    // 6) prefix sums
    cert.push(Conclusion::check("prefix_bound", prefix_bound(blocks), Relation::Less, 3.0 * norm_f));

    // index ranges: disjoint, increasing, starting at N₀ or later
    let mut bad = blocks
        .windows(2)
        .filter(|w| w[1].shift <= w[0].last_log() || w[1].shift < w[1].interval.level() as u64)
        .count();
    if let Some(b) = blocks.first() {
        bad += usize::from(b.first_index() < *n0);
    }
    cert.push(Conclusion::check("index_ranges_increasing", bad as f64, Relation::Equal, 0.0));

    // properties of φ
    let energy = eps.powi(3) * norm_f * norm_f / (16.0 * (a * a) as f64);
    let worst_energy = blocks
        .iter()
        .map(|b| b.gamma.norm_sqr() * b.interval.measure_f64())
        .fold(0.0, f64::max);
    cert.push(Conclusion::check("step_energy", worst_energy, Relation::Less, energy));
    let worst_product = blocks.iter().map(|b| b.magnitude()).fold(0.0, f64::max);
    cert.push(Conclusion::check("step_product", worst_product, Relation::Less, eps / 2.0));
    cert.push(Conclusion::check(
        "step_residual",
        f_minus_phi,
        Relation::Less,
        (eps / 4.0).min(eps / 4.0 * norm_f),
    ));
    let ties = blocks.windows(2).filter(|w| w[0].magnitude() == w[1].magnitude()).count();

    cert.param("order", order);
    cert.param("eps", io::num(eps));
    cert.param("n0", n0.to_string());
    cert.param("norm_f", io::num(norm_f));
    cert.param("norm_g", io::num(norm_g));
    cert.param("blocks", blocks.len());
    cert.param("product_ties", ties);
    cert.param(
        "last_index",
        blocks.last().map(|b| b.last_index().to_string()).unwrap_or_default(),
    );
    Ok(cert)
}

/// `[m, k, re(γ), im(γ), ν₀, s]` per block.
pub fn blocks_to_json(blocks: &[KernelBlock]) -> Value {
    Value::Array(
        blocks
            .iter()
            .map(|b| {
                serde_json::json!([
                    b.interval.level(),
                    b.interval.index(),
                    io::num(b.gamma.re),
                    io::num(b.gamma.im),
                    b.nu0,
                    b.shift
                ])
            })
            .collect(),
    )
}

pub fn blocks_from_json(order: u32, v: &Value) -> Result<Vec<KernelBlock>> {
    let bad = || Error::Format("block entries are [m, k, re, im, nu0, s]".into());
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|e| {
            let e = e.as_array().filter(|e| e.len() == 6).ok_or_else(bad)?;
            let int = |i: usize| e[i].as_u64().ok_or_else(bad);
            Ok(KernelBlock {
                interval: AdicInterval::new(order, int(0)? as u32, int(1)?)?,
                gamma: Complex64::new(io::read_f64(&e[2])?, io::read_f64(&e[3])?),
                nu0: int(4)? as u32,
                shift: int(5)?,
            })
        })
        .collect()
}

/// Raw inputs that [`recheck`] needs.
pub fn certificate_data(f: &StepFunction, g: &CorrectedFunction, uncovered: &CellSet) -> Value {
    serde_json::json!({
        "f": io::step_to_json(f),
        "base": io::step_to_json(&g.base),
        "blocks": blocks_to_json(&g.blocks),
        "uncovered": io::cellset_to_json(uncovered),
    })
}

pub fn recheck(cert: &Certificate) -> Result<Certificate> {
    let data = |k: &str| {
        cert.data
            .get(k)
            .ok_or_else(|| Error::Format(format!("certificate data lacks '{k}'")))
    };
    let f = io::step_from_json(data("f")?)?;
    let base = io::step_from_json(data("base")?)?;
    let blocks = blocks_from_json(f.order(), data("blocks")?)?;
    let uncovered = io::cellset_from_json(data("uncovered")?)?;
    let eps = io::read_f64(cert.params.get("eps").ok_or_else(|| Error::Format("missing eps".into()))?)?;
    let n0 = WalshIndex::parse(
        f.order(),
        cert.params
            .get("n0")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Format("missing n0".into()))?,
    )?;
    let mut out = certify(&f, eps, &n0, &CorrectedFunction { base, blocks }, &uncovered)?;
    out.data = cert.data.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walsh::AdicPoint;

    fn cfg(a: u32) -> Config {
        Config::for_order(a).unwrap()
    }

    #[test]
    fn two_cell_example() {
        let f = StepFunction::from_real(2, 1, &[2.0, 0.0]).unwrap();
        let r = lemma2_construct(&f, &WalshIndex::from_u64(2, 2), 0.3, &cfg(2)).unwrap();
        assert!(r.certificate.passed(), "{}", r.certificate);
        let id = r.certificate.get("p_minus_g_identity").unwrap();
        assert!(id.achieved_value <= 1e-10);
        assert!(r.next_n0 > r.blocks().last().unwrap().last_index());
    }

    #[test]
    fn leading_blocks_match_single_interval_construction() {
        use crate::correction::lemma1::lemma1_construct;
        let f = StepFunction::from_real(2, 1, &[1.0, -0.5]).unwrap();
        let c = cfg(2);
        let r = lemma2_construct(&f, &WalshIndex::from_u64(2, 2), 0.9, &c).unwrap();
        assert!(r.certificate.passed(), "{}", r.certificate);
        let mut n0 = 2u64;
        for b in r.blocks().iter().take(2) {
            let one = lemma1_construct(b.gamma, n0, 0.9, &b.interval, &c).unwrap();
            assert_eq!(one.s as u64, b.shift);
            assert_eq!(WalshIndex::from_u64(2, one.n_max), b.last_index());
            let mut dense = vec![Complex64::new(0.0, 0.0); one.p.len()];
            b.render_into(&mut dense, one.level).unwrap();
            assert_eq!(dense, one.p.values());
            n0 = one.n_max + 1;
        }
        let x = AdicPoint::from_ratio(2, 3, 7).unwrap();
        if r.kept.contains(&x) {
            assert_eq!(r.g.value_at(&x), f.values()[x.cell(1) as usize]);
        }
    }

    #[test]
    fn zero_function_rejected() {
        let f = StepFunction::zero(2, 2).unwrap();
        let err = lemma2_construct(&f, &WalshIndex::from_u64(2, 2), 0.3, &cfg(2)).unwrap_err();
        assert_eq!(err, Error::ZeroNorm);
        let f = StepFunction::from_real(2, 0, &[1.0]).unwrap();
        let err = lemma2_construct(&f, &WalshIndex::from_u64(2, 1), 0.3, &cfg(2)).unwrap_err();
        assert_eq!(err, Error::N0TooSmall(1));
    }

    #[test]
    fn recheck_round_trip_and_tamper() {
        let f = StepFunction::from_real(3, 1, &[0.5, 0.0, -1.0]).unwrap();
        let r = lemma2_construct(&f, &WalshIndex::from_u64(3, 4), 0.6, &cfg(3)).unwrap();
        let again = recheck(&r.certificate).unwrap();
        assert_eq!(again.conclusions, r.certificate.conclusions);
        let mut blocks = r.g.blocks.clone();
        let last = blocks.len() - 1;
        blocks.swap(0, last);
        let bad = certify(&f, 0.6, &r.n0, &CorrectedFunction { base: r.g.base.clone(), blocks }, &r.step.uncovered)
            .unwrap();
        assert!(!bad.passed());
    }

    #[test]
    fn chain_shift_rule() {
        let f = StepFunction::from_real(3, 1, &[1.0, 0.0, 0.0]).unwrap();
        let r = lemma2_construct(&f, &WalshIndex::from_u64(3, 2), 0.6, &cfg(3)).unwrap();
        let b = r.blocks();
        // ⌊log_3 2⌋ = 0, so the first shift equals m
        assert_eq!(b[0].shift, b[0].interval.level() as u64);
        for w in b.windows(2) {
            let n_plus_one = w[0].last_index().add_one();
            assert_eq!(w[1].shift, n_plus_one.floor_log().unwrap() + w[1].interval.level() as u64);
        }
    }
}
