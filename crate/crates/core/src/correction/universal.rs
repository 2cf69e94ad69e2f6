//! One series correcting every dictionary element in turn: element `n` gets
//! the budget `ε·b_n` and continues the index range and the moduli of the
//! elements before it.

use num_traits::Zero;

use crate::adic::{Config, Measure};
use crate::correction::block::KernelBlock;
use crate::correction::certificate::{Certificate, Conclusion, Relation};
use crate::correction::driver::BudgetProfile;
use crate::correction::index::WalshIndex;
use crate::correction::lemma2::{kept_measure, lemma2_with_cap, prefix_bound, Lemma2Result};
use crate::dictionary::{Dictionary, DictionaryElement};
use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone)]
pub struct UniversalStep {
    pub n: u64,
    pub element: DictionaryElement,
    /// `None` for the zero element, which contributes an empty block.
    pub result: Option<Lemma2Result>,
}

#[derive(Debug, Clone)]
pub struct UniversalSeries {
    pub eps: f64,
    pub profile: BudgetProfile,
    pub steps: Vec<UniversalStep>,
    pub next_n0: WalshIndex,
    pub certificate: Certificate,
}

impl UniversalSeries {
    pub fn blocks(&self) -> impl Iterator<Item = &KernelBlock> {
        self.steps.iter().filter_map(|s| s.result.as_ref()).flat_map(|r| r.blocks())
    }

    /// Lower bound on `|∩ E_n|`: one minus the summed lost measures.
    pub fn kept_measure(&self) -> Measure {
        let lost: Measure = self
            .steps
            .iter()
            .filter_map(|s| s.result.as_ref())
            .map(|r| Measure::one() - kept_measure(r.blocks(), &r.step.uncovered))
            .sum();
        Measure::one() - lost
    }
}

pub fn universal_series(
    eps: f64,
    n_max: u64,
    n0: &WalshIndex,
    profile: BudgetProfile,
    config: &Config,
) -> Result<UniversalSeries> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsOutOfRange(eps));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let order = config.order;
    let mut next = n0.clone();
    let mut cap = None;
    let mut steps = Vec::new();
    for (i, element) in Dictionary::new(order)?.take(n_max as usize).enumerate() {
        let n = i as u64 + 1;
        if element.values.iter().all(|v| v.is_zero()) {
            steps.push(UniversalStep { n, element, result: None });
            continue;
        }
        let f = element.to_step()?;
        let mut r = lemma2_with_cap(&f, &next, eps * profile.factor(n as u32), cap, config).map_err(|e| match e {
            Error::Infeasible { reason } => Error::Infeasible {
                reason: format!("dictionary element {n}: {reason}"),
            },
            other => other,
        })?;
        r.certificate.data = serde_json::Value::Null;
        cap = r.blocks().iter().map(|b| b.magnitude()).reduce(f64::min).or(cap);
        next = r.next_n0.clone();
        steps.push(UniversalStep { n, element, result: Some(r) });
    }
    let mut series = UniversalSeries {
        eps,
        profile,
        steps,
        next_n0: next,
        certificate: Certificate::new("universal"),
    };
    series.certificate = certify(&series);
    Ok(series)
}

fn certify(series: &UniversalSeries) -> Certificate {
    let mut cert = Certificate::new("universal");
    let kept = series.kept_measure();
    let floor = Measure::one() - Measure::from_f64(series.eps).unwrap_or_else(|_| Measure::zero());
    cert.push(Conclusion::exact("kept_measure", kept.to_f64(), Relation::Greater, floor.to_f64(), kept > floor));
    let mags: Vec<f64> = series.blocks().map(|b| b.magnitude()).collect();
    let climb = mags.windows(2).map(|w| (w[1] - w[0]) / w[0]).fold(0.0, f64::max);
    cert.push(Conclusion::check("series_non_increasing", climb, Relation::LessEq, 1e-12));
    let blocks: Vec<KernelBlock> = series.blocks().cloned().collect();
    let bad = blocks.windows(2).filter(|w| w[1].shift <= w[0].last_log()).count();
    cert.push(Conclusion::check("index_ranges_increasing", bad as f64, Relation::Equal, 0.0));
    let failed = series
        .steps
        .iter()
        .filter_map(|s| s.result.as_ref())
        .filter(|r| !r.certificate.passed())
        .count();
    cert.push(Conclusion::check("step_certificates", failed as f64, Relation::Equal, 0.0));
    cert.param("eps", io::num(series.eps));
    cert.param("profile", series.profile.name());
    cert.param("elements", series.steps.len());
    cert.param("blocks", blocks.len());
    cert.param("prefix_bound", io::num(prefix_bound(&blocks)));
    cert.trace = series
        .steps
        .iter()
        .map(|s| {
            let (count, first, last) = match &s.result {
                Some(r) => (
                    r.blocks().len(),
                    r.blocks().first().map(|b| b.first_index().to_string()),
                    r.blocks().last().map(|b| b.last_index().to_string()),
                ),
                None => (0, None, None),
            };
            serde_json::json!({
                "n": s.n,
                "level": s.element.level,
                "values": s.element.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "blocks": count,
                "first_index": first,
                "last_index": last,
            })
        })
        .collect();
    cert
}
