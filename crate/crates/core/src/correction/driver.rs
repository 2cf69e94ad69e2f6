//! The iterative corrector: repeatedly correct the current residual with
//! shrinking budgets, chaining index ranges and capping block moduli so the
//! concatenated series keeps non-increasing coefficient moduli.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::Value;

use crate::adic::{CellSet, Config, Measure, Norm, StepFunction};
use crate::correction::block::{CorrectedFunction, KernelBlock};
use crate::correction::certificate::{Certificate, Conclusion, Relation};
use crate::correction::index::WalshIndex;
use crate::correction::lemma2::{kernel_moduli, lemma2_with_cap, prefix_bound, Lemma2Result, MAGNITUDE_REL_TOL};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::io;

/// Per-step budgets `b_q`: step `q` runs with `ε·b_q` and the residual target
/// is `ϵ̂·b_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetProfile {
    /// `4^(-8(q+2))`.
    Verbatim,
    /// `4^(-(q+2))`.
    Relaxed,
    /// `2^(-q)`.
    Geometric,
}

impl BudgetProfile {
    pub fn factor(self, q: u32) -> f64 {
        match self {
            BudgetProfile::Verbatim => 4f64.powi(-8 * (q as i32 + 2)),
            BudgetProfile::Relaxed => 4f64.powi(-(q as i32 + 2)),
            BudgetProfile::Geometric => 2f64.powi(-(q as i32)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BudgetProfile::Verbatim => "verbatim",
            BudgetProfile::Relaxed => "relaxed",
            BudgetProfile::Geometric => "geometric",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "verbatim" => Ok(BudgetProfile::Verbatim),
            "relaxed" => Ok(BudgetProfile::Relaxed),
            "geometric" => Ok(BudgetProfile::Geometric),
            other => Err(Error::InvalidArgument(format!("unknown budget profile '{other}'"))),
        }
    }
}

/// What gets corrected at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    /// The residual itself.
    Direct,
    /// The nearest of the first `depth` dictionary elements.
    Strict { depth: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverOptions {
    pub eps: f64,
    pub tol: f64,
    pub q_max: u32,
    pub profile: BudgetProfile,
    pub mode: SelectionMode,
    pub n0: u64,
}

impl DriverOptions {
    pub fn new(eps: f64, tol: f64) -> Self {
        DriverOptions {
            eps,
            tol,
            q_max: 8,
            profile: BudgetProfile::Verbatim,
            mode: SelectionMode::Direct,
            n0: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub q: u32,
    pub step_eps: f64,
    /// `‖r_(q+1)‖₁` after the step.
    pub residual_l1: f64,
    pub block_range: (WalshIndex, WalshIndex),
    /// Largest and smallest block modulus of the step.
    pub block_magnitude: (f64, f64),
    /// Prefix-norm bound of the series so far.
    pub partial_sum_sup_l1: f64,
    pub blocks: usize,
    /// `‖r_q - f_q‖₁` for the chosen target (0 in direct mode).
    pub target_distance: f64,
}

#[derive(Debug, Clone)]
pub struct CorrectionResult {
    pub f: StepFunction,
    pub options: DriverOptions,
    /// `ϵ̂ = min(ε/2, lower bound on ∫_E|f|)`.
    pub eps_hat: f64,
    pub steps: Vec<Lemma2Result>,
    /// `g = Σ P_q` with all blocks in series order.
    pub g: CorrectedFunction,
    pub residual: StepFunction,
    pub trace: Vec<TraceEntry>,
    pub certificate: Certificate,
}

/// `min(ε/2, ‖f‖₁ - (largest mass |f| can put on a set of measure ε))`.
pub fn eps_hat(f: &StepFunction, eps: f64) -> f64 {
    let mut mags: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let w = f.cell_measure();
    let mut left = eps;
    let mut top = 0.0;
    for m in mags {
        let take = left.min(w);
        top += take * m;
        left -= take;
        if left <= 0.0 {
            break;
        }
    }
    (eps / 2.0).min(f.norm(Norm::L1) - top)
}

pub fn correct_function(f: &StepFunction, opts: &DriverOptions, config: &Config) -> Result<CorrectionResult> {
    if !(opts.eps > 0.0 && opts.eps < 1.0) {
        return Err(Error::EpsOutOfRange(opts.eps));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if f.norm(Norm::L1) == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let hat = eps_hat(f, opts.eps);
    let mut residual = f.clone();
    let mut n0 = WalshIndex::from_u64(f.order(), opts.n0);
    let mut cap: Option<f64> = None;
    let mut steps: Vec<Lemma2Result> = Vec::new();
    let mut trace = Vec::new();
    let mut blocks: Vec<KernelBlock> = Vec::new();

    for q in 1..=opts.q_max {
        if residual.norm(Norm::L1) <= opts.tol {
            break;
        }
        let budget = opts.profile.factor(q);
        let (target, distance) = match opts.mode {
            SelectionMode::Direct => (residual.clone(), 0.0),
            SelectionMode::Strict { depth } => match nearest_element(&residual, depth)? {
                Some(found) => found,
                None => break,
            },
        };
        let step_eps = opts.eps * budget;
        let mut step = lemma2_with_cap(&target, &n0, step_eps, cap, config)?;
        // the combined certificate carries the blocks once
        step.certificate.data = Value::Null;
        residual = residual.sub(&target)?;
        let first = step.blocks().first().map(|b| b.first_index()).unwrap_or_else(|| n0.clone());
        let last = step.blocks().last().map(|b| b.last_index()).unwrap_or_else(|| n0.clone());
        let hi = step.blocks().iter().map(|b| b.magnitude()).fold(0.0, f64::max);
        let lo = step.blocks().iter().map(|b| b.magnitude()).fold(f64::INFINITY, f64::min);
        cap = Some(lo);
        n0 = step.next_n0.clone();
        blocks.extend_from_slice(step.blocks());
        trace.push(TraceEntry {
            q,
            step_eps,
            residual_l1: residual.norm(Norm::L1),
            block_range: (first, last),
            block_magnitude: (hi, lo),
            partial_sum_sup_l1: prefix_bound(&blocks),
            blocks: step.blocks().len(),
            target_distance: distance,
        });
        steps.push(step);
    }

    let g = CorrectedFunction {
        base: StepFunction::zero(f.order(), f.level())?,
        blocks,
    };
    let certificate = certify(f, opts, hat, &g, &residual, &steps)?;
    let mut result = CorrectionResult {
        f: f.clone(),
        options: *opts,
        eps_hat: hat,
        steps,
        g,
        residual,
        trace,
        certificate,
    };
    result.certificate.trace = result.trace.iter().map(trace_to_json).collect();
    result.certificate.data = certificate_data(&result);
    Ok(result)
}

/// Best dictionary element at the residual's resolution among the first
/// `depth`, with its distance; `None` when nothing beats the zero function.
fn nearest_element(r: &StepFunction, depth: usize) -> Result<Option<(StepFunction, f64)>> {
    let here = r.norm(Norm::L1);
    let mut best: Option<(StepFunction, f64)> = None;
    for e in Dictionary::new(r.order())?.take(depth) {
        if e.level > r.level() || e.values.iter().all(|v| v.is_zero()) {
            continue;
        }
        let d = e.to_step()?.refine(r.level())?;
        let dist = r.sub(&d)?.norm(Norm::L1);
        if dist < best.as_ref().map_or(here, |b| b.1) {
            best = Some((d, dist));
        }
    }
    Ok(best)
}

fn trace_to_json(t: &TraceEntry) -> Value {
    serde_json::json!({
        "q": t.q,
        "step_eps": io::num(t.step_eps),
        "residual_l1": io::num(t.residual_l1),
        "block_range": [t.block_range.0.to_string(), t.block_range.1.to_string()],
        "block_magnitude": [io::num(t.block_magnitude.0), io::num(t.block_magnitude.1)],
        "partial_sum_sup_l1": io::num(t.partial_sum_sup_l1),
        "blocks": t.blocks,
        "target_distance": io::num(t.target_distance),
    })
}

/// Exact measure of `{f ≠ g}` covered by the lost parts of every block plus
/// the support of the final residual.
pub fn disagreement_bound(blocks: &[KernelBlock], residual: &StepFunction) -> Measure {
    let mut groups: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for b in blocks {
        *groups.entry((b.interval.level(), b.nu0)).or_default() += 1;
    }
    let order = residual.order();
    let lost: Measure = groups
        .into_iter()
        .map(|((level, nu0), count)| Measure::cells(count, order, level).mul(&Measure::inv_pow(order, nu0)))
        .sum();
    let support = residual.values().iter().filter(|v| v.norm() > 0.0).count() as u64;
    lost + Measure::cells(support, order, residual.level())
}

fn certify(
    f: &StepFunction,
    opts: &DriverOptions,
    hat: f64,
    g: &CorrectedFunction,
    residual: &StepFunction,
    steps: &[Lemma2Result],
) -> Result<Certificate> {
    let norm_f = f.norm(Norm::L1);
    let blocks = &g.blocks;
    let mut cert = Certificate::new("correction");

    let lost = disagreement_bound(blocks, residual);
    let eps = Measure::from_f64(opts.eps)?;
    cert.push(Conclusion::exact("disagreement_measure", lost.to_f64(), Relation::Less, opts.eps, lost < eps));
    let kept = Measure::one() - lost.clone();
    let floor = Measure::one() - eps;
    cert.push(Conclusion::exact("kept_measure", kept.to_f64(), Relation::Greater, floor.to_f64(), kept > floor));

    // ‖g‖₁: exact when the blocks are disjoint, otherwise bracketed
    let (lower, upper) = if g.blocks_disjoint() {
        let v = g.l1_norm()?;
        (v, v)
    } else {
        let up: f64 = blocks.iter().map(|b| b.l1_norm()).sum();
        let lost_f = residual_free_mass(f, lost.to_f64());
        (lost_f, up)
    };
    cert.push(Conclusion::check("g_l1_lower", lower, Relation::Greater, 0.5 * norm_f));
    cert.push(Conclusion::check("g_l1_upper", upper, Relation::Less, 4.0 * norm_f));

    let mut moduli: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
    for b in blocks {
        if let std::collections::btree_map::Entry::Vacant(v) = moduli.entry(b.nu0) {
            v.insert(kernel_moduli(f.order(), b.nu0)?);
        }
    }
    let ranges: Vec<(f64, f64)> = blocks
        .iter()
        .map(|b| {
            let (lo, hi) = moduli[&b.nu0];
            (b.magnitude() * lo, b.magnitude() * hi)
        })
        .collect();
    let climb = ranges
        .windows(2)
        .map(|w| (w[1].1 - w[0].0) / w[0].0)
        .chain(ranges.iter().map(|r| (r.1 - r.0) / r.0))
        .fold(0.0, f64::max);
    cert.push(Conclusion::check("series_non_increasing", climb, Relation::LessEq, MAGNITUDE_REL_TOL));
    let bad_ranges = blocks.windows(2).filter(|w| w[1].shift <= w[0].last_log()).count();
    cert.push(Conclusion::check("index_ranges_increasing", bad_ranges as f64, Relation::Equal, 0.0));

    let sup = prefix_bound(blocks);
    cert.push(Conclusion::check("sup_prefix_l1", sup, Relation::LessEq, 12.0 * norm_f));

    // With non-increasing moduli (ties by index) greedy order is series
    // order, so G_m(g) are the series prefixes and the full sum is g itself.
    let tail: f64 = 0.0;
    cert.push(Conclusion::check("greedy_full_support_error", tail, Relation::LessEq, opts.tol));
    let r = residual.norm(Norm::L1);
    cert.push(Conclusion::check("residual_l1", r, Relation::LessEq, opts.tol));
    let failed_steps = steps.iter().filter(|s| !s.certificate.passed()).count();
    cert.push(Conclusion::check("step_certificates", failed_steps as f64, Relation::Equal, 0.0));

    cert.param("order", f.order());
    cert.param("eps", io::num(opts.eps));
    cert.param("eps_hat", io::num(hat));
    cert.param("tol", io::num(opts.tol));
    cert.param("q_max", opts.q_max);
    cert.param("profile", opts.profile.name());
    cert.param(
        "mode",
        match opts.mode {
            SelectionMode::Direct => "direct".to_string(),
            SelectionMode::Strict { depth } => format!("strict:{depth}"),
        },
    );
    cert.param("norm_f", io::num(norm_f));
    cert.param("steps", steps.len());
    cert.param("blocks", blocks.len());
    if let (Some(first), Some(last)) = (ranges.first(), ranges.last()) {
        cert.param("decay_ratio", io::num(last.0 / first.1));
    }
    Ok(cert)
}

/// Lower bound on `∫_E |f|` over sets whose complement has measure `lost`.
fn residual_free_mass(f: &StepFunction, lost: f64) -> f64 {
    let mut mags: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let w = f.cell_measure();
    let mut left = lost;
    let mut top = 0.0;
    for m in mags {
        if left <= 0.0 {
            break;
        }
        let take = left.min(w);
        top += take * m;
        left -= take;
    }
    f.norm(Norm::L1) - top
}

/// Greedy error after each whole block: `‖Σ_(ν>j) P_ν‖₁`, exact for disjoint
/// blocks and an upper bound otherwise.
pub fn block_greedy_curve(blocks: &[KernelBlock]) -> Vec<f64> {
    let norms: Vec<f64> = blocks.iter().map(|b| b.l1_norm()).collect();
    let mut tail: f64 = norms.iter().sum();
    let mut out = Vec::with_capacity(norms.len() + 1);
    out.push(tail);
    for n in norms {
        tail -= n;
        out.push(tail.max(0.0));
    }
    out
}

/// Raw inputs for an independent recheck of the blocks of every step.
pub fn certificate_data(result: &CorrectionResult) -> Value {
    serde_json::json!({
        "f": io::step_to_json(&result.f),
        "blocks": crate::correction::lemma2::blocks_to_json(&result.g.blocks),
        "residual": io::step_to_json(&result.residual),
    })
}

pub fn recheck(cert: &Certificate) -> Result<Certificate> {
    let data = |k: &str| {
        cert.data
            .get(k)
            .ok_or_else(|| Error::Format(format!("certificate data lacks '{k}'")))
    };
    let f = io::step_from_json(data("f")?)?;
    let residual = io::step_from_json(data("residual")?)?;
    let blocks = crate::correction::lemma2::blocks_from_json(f.order(), data("blocks")?)?;
    let param = |k: &str| cert.params.get(k).ok_or_else(|| Error::Format(format!("missing param '{k}'")));
    let mode = match param("mode")?.as_str().unwrap_or("direct") {
        "direct" => SelectionMode::Direct,
        s => SelectionMode::Strict {
            depth: s.trim_start_matches("strict:").parse().unwrap_or(0),
        },
    };
    let opts = DriverOptions {
        eps: io::read_f64(param("eps")?)?,
        tol: io::read_f64(param("tol")?)?,
        q_max: param("q_max")?.as_u64().unwrap_or(0) as u32,
        profile: BudgetProfile::parse(param("profile")?.as_str().unwrap_or(""))?,
        mode,
        n0: 2,
    };
    let hat = io::read_f64(param("eps_hat")?)?;
    let g = CorrectedFunction {
        base: StepFunction::zero(f.order(), f.level())?,
        blocks,
    };
    // step certificates are not part of the raw data; carry their verdict over
    let mut out = certify(&f, &opts, hat, &g, &residual, &[])?;
    if let (Some(old), Some(new)) = (
        cert.get("step_certificates"),
        out.conclusions.iter_mut().find(|c| c.name == "step_certificates"),
    ) {
        *new = old.clone();
    }
    out.trace = cert.trace.clone();
    out.data = cert.data.clone();
    Ok(out)
}

/// Cells where `f` and `g` differ, when the corrected function is small
/// enough to render.
pub fn dense_disagreement(result: &CorrectionResult, level: u32, tol: f64) -> Result<(Measure, CellSet)> {
    let dense = result.g.render(level)?;
    crate::adic::disagreement_measure(&result.f, &dense, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: u32) -> Config {
        Config::for_order(a).unwrap()
    }

    #[test]
    fn budgets() {
        assert_eq!(BudgetProfile::Verbatim.factor(1), 4f64.powi(-24));
        assert_eq!(BudgetProfile::Relaxed.factor(1), 1.0 / 64.0);
        assert_eq!(BudgetProfile::Geometric.factor(2), 0.25);
        assert_eq!(BudgetProfile::parse("relaxed").unwrap(), BudgetProfile::Relaxed);
        assert!(BudgetProfile::parse("fast").is_err());
    }

    #[test]
    fn eps_hat_examples() {
        let f = StepFunction::from_real(2, 1, &[1.0, 0.0]).unwrap();
        assert!((eps_hat(&f, 0.25) - 0.125).abs() < 1e-15);
        let f = StepFunction::from_real(2, 1, &[0.1, 0.1]).unwrap();
        assert!((eps_hat(&f, 0.5) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn constant_terminates_after_one_step() {
        let f = StepFunction::from_real(2, 0, &[1.0]).unwrap();
        let opts = DriverOptions {
            profile: BudgetProfile::Geometric,
            ..DriverOptions::new(0.5, 1e-3)
        };
        let r = correct_function(&f, &opts, &cfg(2)).unwrap();
        assert_eq!(r.steps.len(), 1);
        assert!(r.certificate.passed(), "{}", r.certificate);
        assert!(r.certificate.get("disagreement_measure").unwrap().achieved_value < 0.5);
    }

    #[test]
    fn verbatim_budget_is_infeasible() {
        let f = StepFunction::from_real(2, 0, &[1.0]).unwrap();
        let r = correct_function(&f, &DriverOptions::new(0.25, 1e-3), &cfg(2));
        assert!(matches!(r, Err(Error::Infeasible { .. })));
    }

    #[test]
    fn strict_mode_runs_several_steps() {
        let f = StepFunction::from_real(2, 1, &[1.0, -1.0]).unwrap();
        let opts = DriverOptions {
            profile: BudgetProfile::Geometric,
            mode: SelectionMode::Strict { depth: 50 },
            eps: 0.9,
            q_max: 3,
            ..DriverOptions::new(0.9, 1e-3)
        };
        let c = Config { max_blocks: 200_000, ..cfg(2) };
        let r = correct_function(&f, &opts, &c).unwrap();
        assert!(!r.steps.is_empty());
        assert!(r.certificate.get("series_non_increasing").unwrap().pass);
        assert!(r.certificate.get("index_ranges_increasing").unwrap().pass);
    }

    #[test]
    fn recheck_matches() {
        let f = StepFunction::from_real(3, 1, &[0.0, 1.0, 0.5]).unwrap();
        let opts = DriverOptions {
            profile: BudgetProfile::Geometric,
            ..DriverOptions::new(0.6, 1e-6)
        };
        let r = correct_function(&f, &opts, &cfg(3)).unwrap();
        let again = recheck(&r.certificate).unwrap();
        assert_eq!(again.conclusions, r.certificate.conclusions);
        let curve = block_greedy_curve(&r.g.blocks);
        assert!(curve.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(*curve.last().unwrap(), 0.0);
    }
}
