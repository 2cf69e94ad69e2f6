//! The single-interval construction `P = γ·χ_Δ(x)·I(a^s x)`: a polynomial
//! whose coefficients all have modulus `|γ||Δ|`, equal to `γ` on most of `Δ`
//! and vanishing off it.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde_json::Value;

use crate::adic::{indicator, menshov_kernel, AdicInterval, CellSet, Config, Measure, Norm, StepFunction};
use crate::correction::certificate::{Certificate, Conclusion, Relation};
use crate::correction::polynomial::WalshPolynomial;
use crate::error::{Error, Result};
use crate::io;
use crate::walsh::{analyze, Method};

/// Relative threshold separating structural zeros from coefficients.
pub const COEFF_REL_THRESHOLD: f64 = 1e-9;
/// Tolerance on reconstructed values and on the proof identities.
pub const EQ_TOL: f64 = 1e-10;

/// `ν₀ = ⌊log_a(1/ε)⌋ + 1`, evaluated on the exact value of the double `ε`.
pub fn nu0_for(order: u32, eps: f64) -> Result<u32> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsOutOfRange(eps));
    }
    let r = BigRational::from_float(eps).ok_or(Error::EpsOutOfRange(eps))?;
    let a = BigRational::from_integer(BigInt::from(order));
    let mut k = 0u32;
    let mut scaled = &r * &a;
    while scaled <= BigRational::one() {
        k += 1;
        scaled *= &a;
    }
    Ok(k + 1)
}

/// `⌊log_a n⌋` for `n >= 1`.
pub fn ilog(order: u32, n: u64) -> u32 {
    let a = order as u64;
    let (mut k, mut n) = (0u32, n);
    while n >= a {
        n /= a;
        k += 1;
    }
    k
}

/// Output of [`lemma1_construct`].
#[derive(Debug, Clone)]
pub struct Lemma1Result {
    pub gamma: Complex64,
    pub n0: u64,
    pub eps: f64,
    pub interval: AdicInterval,
    pub nu0: u32,
    pub s: u32,
    /// Upper end `N` of the index range.
    pub n_max: u64,
    /// Grid level `s + ν₀` on which `P` is exact.
    pub level: u32,
    pub coeff_magnitude: f64,
    pub p: StepFunction,
    pub polynomial: WalshPolynomial,
    pub kept_set: CellSet,
    pub certificate: Certificate,
}

pub fn lemma1_construct(
    gamma: Complex64,
    n0: u64,
    eps: f64,
    interval: &AdicInterval,
    config: &Config,
) -> Result<Lemma1Result> {
    let order = interval.order();
    if order != config.order {
        return Err(Error::OrderMismatch(config.order, order));
    }
    if gamma.norm() == 0.0 || !gamma.norm().is_finite() {
        return Err(Error::ZeroGamma);
    }
    let nu0 = nu0_for(order, eps)?;
    if n0 <= 1 {
        return Err(Error::N0TooSmall(n0));
    }
    let m = interval.level();
    if m == 0 {
        return Err(Error::InvalidInterval {
            order,
            level: 0,
            index: interval.index(),
        });
    }
    let s = ilog(order, n0) + m;
    let level = s as u64 + nu0 as u64;
    config.ensure_level(level)?;
    let level = level as u32;

    let a = order as u64;
    let n_max = a.pow(level) + a.pow(m) - a.pow(s) - 1;

    let first = AdicInterval::new(order, nu0, 1)?;
    let kernel = menshov_kernel(&first, nu0)?.dilate(s, config)?;
    let p = indicator(interval, level)?.scale(gamma).mul(&kernel)?;

    let spec = analyze(&p, Method::Fast)?;
    let peak = spec.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let polynomial = WalshPolynomial::from_spectrum(&spec, COEFF_REL_THRESHOLD * peak);

    let range = interval.cell_range(level)?;
    let kept: Vec<u64> = range
        .filter(|&c| (p.values()[c as usize] - gamma).norm() <= EQ_TOL * gamma.norm())
        .collect();
    let kept_set = CellSet::new(order, level, kept)?;

    let coeff_magnitude = gamma.norm() * interval.measure_f64();
    let certificate = certify(
        gamma,
        n0,
        eps,
        interval,
        &Derived { nu0, s, n_max, level },
        &polynomial,
        &kept_set,
    )?;
    Ok(Lemma1Result {
        gamma,
        n0,
        eps,
        interval: *interval,
        nu0,
        s,
        n_max,
        level,
        coeff_magnitude,
        p,
        polynomial,
        kept_set,
        certificate,
    })
}

/// The integers a certificate is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Derived {
    pub nu0: u32,
    pub s: u32,
    pub n_max: u64,
    pub level: u32,
}

/// Rechecks every claim from the polynomial and kept set alone: nothing here
/// looks at how `P` was assembled.
pub fn certify(
    gamma: Complex64,
    n0: u64,
    eps: f64,
    interval: &AdicInterval,
    d: &Derived,
    polynomial: &WalshPolynomial,
    kept: &CellSet,
) -> Result<Certificate> {
    let order = interval.order();
    let a = order as u64;
    let m = interval.level();
    let delta = interval.measure();
    let delta_f = interval.measure_f64();
    let g = gamma.norm();
    let mut cert = Certificate::new("lemma1");

    // 1) coefficient structure
    let target = g * delta_f;
    let worst = polynomial
        .terms()
        .iter()
        .map(|(_, c)| (c.norm() - target).abs() / target)
        .fold(0.0, f64::max);
    cert.push(Conclusion::check("coefficient_magnitude", worst, Relation::LessEq, COEFF_REL_THRESHOLD));
    let mut expected: Vec<u64> = (1..a.pow(d.nu0))
        .flat_map(|j| (0..a.pow(m)).map(move |i| j * a.pow(d.s) + i))
        .collect();
    expected.sort_unstable();
    let got = polynomial.indices();
    let mismatches = expected.len().abs_diff(got.len())
        + expected.iter().zip(&got).filter(|(x, y)| x != y).count();
    cert.push(Conclusion::check("index_set", mismatches as f64, Relation::Equal, 0.0));
    let lo = got.first().copied().unwrap_or(u64::MAX) as f64;
    let hi = got.last().copied().unwrap_or(0) as f64;
    cert.push(Conclusion::check("index_min_at_least_n0", lo, Relation::GreaterEq, n0 as f64));
    cert.push(Conclusion::check("index_max_at_most_n", hi, Relation::LessEq, d.n_max as f64));

    // 2) |E| > (1 - ε)|Δ|
    let e = kept.measure();
    let one_minus = Measure::one() - Measure::from_f64(eps)?;
    let bound = one_minus.mul(&delta);
    cert.push(Conclusion::exact("kept_measure", e.to_f64(), Relation::Greater, bound.to_f64(), e > bound));

    // 3) P = γ on E and 0 off Δ, read off the synthesized polynomial
    let synth = polynomial.synthesize(d.level)?;
    let range = interval.cell_range(d.level)?;
    let on_e = kept
        .members()
        .iter()
        .map(|&c| (synth.values()[c as usize] - gamma).norm())
        .fold(0.0, f64::max);
    let outside = synth
        .values()
        .iter()
        .enumerate()
        .filter(|(c, _)| !range.contains(&(*c as u64)))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let e_in_delta = kept.members().iter().all(|c| range.contains(c));
    cert.push(Conclusion::check("equals_gamma_on_kept_set", on_e / g, Relation::LessEq, EQ_TOL));
    cert.push(Conclusion::check("zero_off_interval", outside / g, Relation::LessEq, EQ_TOL));
    cert.push(Conclusion::check(
        "kept_set_inside_interval",
        if e_in_delta { 0.0 } else { 1.0 },
        Relation::Equal,
        0.0,
    ));

    // 4) ½|γ||Δ| < ∫|P| < 2|γ||Δ|
    let l1 = synth.norm(Norm::L1);
    cert.push(Conclusion::check("l1_lower", l1, Relation::Greater, 0.5 * g * delta_f));
    cert.push(Conclusion::check("l1_upper", l1, Relation::Less, 2.0 * g * delta_f));

    // 5) partial sums
    let prefix = polynomial.max_prefix_l1(d.level)?;
    let bound = order as f64 * g * (delta_f / eps).sqrt();
    cert.push(Conclusion::check("partial_sum_bound", prefix, Relation::Less, bound));

    // identities from the proof
    let tail = Measure::one() - Measure::inv_pow(order, d.nu0);
    let e_exact = Measure::inv_pow(order, m).mul(&tail);
    let e_dev = ((e.to_f64() - e_exact.to_f64()) / e_exact.to_f64()).abs();
    cert.push(Conclusion::exact("kept_measure_identity", e_dev, Relation::LessEq, EQ_TOL, e == e_exact));
    let l1_exact = 2.0 * g * delta_f * tail.to_f64();
    cert.push(Conclusion::close("l1_identity", l1 / l1_exact, 1.0, EQ_TOL));

    cert.param("order", order);
    cert.param("gamma", io::complex_pair(gamma));
    cert.param("n0", n0);
    cert.param("eps", io::num(eps));
    cert.param("interval", interval.to_string());
    cert.param("nu0", d.nu0);
    cert.param("s", d.s);
    cert.param("n", d.n_max);
    cert.param("level", d.level);
    cert.data = serde_json::json!({
        "polynomial": io::polynomial_to_json(polynomial),
        "kept_set": io::cellset_to_json(kept),
    });
    Ok(cert)
}

/// Rebuilds the inputs of [`certify`] from a serialized certificate.
pub fn recheck(cert: &Certificate) -> Result<Certificate> {
    let p = &cert.params;
    let get = |k: &str| p.get(k).ok_or_else(|| Error::Format(format!("missing param '{k}'")));
    let as_u64 = |k: &str| -> Result<u64> {
        get(k)?.as_u64().ok_or_else(|| Error::Format(format!("param '{k}' must be an integer")))
    };
    let order = as_u64("order")? as u32;
    let gamma = match get("gamma")? {
        Value::Array(v) if v.len() == 2 => Complex64::new(io::read_f64(&v[0])?, io::read_f64(&v[1])?),
        other => Complex64::new(io::read_f64(other)?, 0.0),
    };
    let eps = io::read_f64(get("eps")?)?;
    let interval = crate::adic::parse_interval(
        order,
        get("interval")?.as_str().ok_or_else(|| Error::Format("interval must be 'm:k'".into()))?,
    )?;
    let d = Derived {
        nu0: as_u64("nu0")? as u32,
        s: as_u64("s")? as u32,
        n_max: as_u64("n")?,
        level: as_u64("level")? as u32,
    };
    let poly = io::polynomial_from_json(
        cert.data.get("polynomial").ok_or_else(|| Error::Format("missing polynomial".into()))?,
    )?;
    let kept = io::cellset_from_json(
        cert.data.get("kept_set").ok_or_else(|| Error::Format("missing kept_set".into()))?,
    )?;
    certify(gamma, as_u64("n0")?, eps, &interval, &d, &poly, &kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: u32) -> Config {
        Config::for_order(a).unwrap()
    }

    #[test]
    fn nu0_examples() {
        assert_eq!(nu0_for(2, 0.4).unwrap(), 2);
        assert_eq!(nu0_for(2, 0.5).unwrap(), 2);
        assert_eq!(nu0_for(3, 0.9).unwrap(), 1);
        assert_eq!(nu0_for(2, 1.0 / 64.0).unwrap(), 7);
        // the double nearest 0.01 lies just above it
        assert_eq!(nu0_for(10, 0.01).unwrap(), 2);
        assert!(matches!(nu0_for(2, 1.0), Err(Error::EpsOutOfRange(_))));
        assert_eq!(ilog(2, 2), 1);
        assert_eq!(ilog(3, 26), 2);
        assert_eq!(ilog(3, 27), 3);
    }

    #[test]
    fn worked_instance() {
        let delta = AdicInterval::new(2, 1, 1).unwrap();
        let r = lemma1_construct(Complex64::new(1.0, 0.0), 2, 0.4, &delta, &cfg(2)).unwrap();
        assert_eq!((r.nu0, r.s, r.n_max), (2, 2, 13));
        assert_eq!(r.polynomial.indices(), vec![4, 5, 8, 9, 12, 13]);
        assert!(r.polynomial.terms().iter().all(|(_, c)| (c.norm() - 0.5).abs() < 1e-15));
        assert_eq!(r.kept_set.measure(), Measure::cells(3, 2, 3));
        assert!((r.p.norm(Norm::L1) - 0.75).abs() < 1e-15);
        assert!(r.certificate.passed(), "{}", r.certificate);
        let bound = r.certificate.get("partial_sum_bound").unwrap().claimed_bound;
        assert!((bound - 2.0 * 1.25f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn scaling_in_gamma() {
        let delta = AdicInterval::new(2, 1, 1).unwrap();
        let one = lemma1_construct(Complex64::new(1.0, 0.0), 2, 0.4, &delta, &cfg(2)).unwrap();
        let two = lemma1_construct(Complex64::new(-2.0, 0.0), 2, 0.4, &delta, &cfg(2)).unwrap();
        assert_eq!(one.polynomial.indices(), two.polynomial.indices());
        assert_eq!(one.kept_set, two.kept_set);
        assert!((two.p.norm(Norm::L1) - 1.5).abs() < 1e-15);
        for ((_, x), (_, y)) in one.polynomial.terms().iter().zip(two.polynomial.terms()) {
            assert!((*y - *x * -2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn distinct_errors() {
        let delta = AdicInterval::new(2, 1, 1).unwrap();
        let c = Complex64::new(1.0, 0.0);
        assert_eq!(lemma1_construct(Complex64::new(0.0, 0.0), 2, 0.4, &delta, &cfg(2)).unwrap_err(), Error::ZeroGamma);
        assert!(matches!(lemma1_construct(c, 2, 1.5, &delta, &cfg(2)), Err(Error::EpsOutOfRange(_))));
        assert_eq!(lemma1_construct(c, 1, 0.4, &delta, &cfg(2)).unwrap_err(), Error::N0TooSmall(1));
        let small = cfg(2).with_max_level(3);
        assert!(matches!(lemma1_construct(c, 2, 0.4, &delta, &small), Err(Error::Resolution { .. })));
    }

    #[test]
    fn tampering_is_detected() {
        let delta = AdicInterval::new(3, 1, 2).unwrap();
        let r = lemma1_construct(Complex64::new(0.5, 1.0), 5, 0.3, &delta, &cfg(3)).unwrap();
        let again = recheck(&r.certificate).unwrap();
        assert!(again.passed(), "{again}");
        let mut terms = r.polynomial.terms().to_vec();
        terms[0].1 = Complex64::new(0.0, 0.0);
        let poly = WalshPolynomial::new(3, terms).unwrap();
        let d = Derived { nu0: r.nu0, s: r.s, n_max: r.n_max, level: r.level };
        let bad = certify(r.gamma, r.n0, r.eps, &r.interval, &d, &poly, &r.kept_set).unwrap();
        assert!(!bad.get("equals_gamma_on_kept_set").unwrap().pass);
    }
}
