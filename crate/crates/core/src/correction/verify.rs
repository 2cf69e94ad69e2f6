//! Independent rechecking of stored certificates.

use crate::correction::certificate::Certificate;
use crate::correction::{driver, lemma1, lemma2};
use crate::error::{Error, Result};

/// Relative agreement required between stored and recomputed values.
pub const VALUE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub recomputed: Certificate,
    /// Conclusions whose stored verdict or value disagrees with the recheck.
    pub mismatches: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.recomputed.passed()
    }
}

/// Recomputes every conclusion from the certificate's raw data and compares.
pub fn verify(cert: &Certificate) -> Result<VerifyReport> {
    let recomputed = match cert.kind.as_str() {
        "lemma1" => lemma1::recheck(cert)?,
        "lemma2" => lemma2::recheck(cert)?,
        "correction" => driver::recheck(cert)?,
        other => return Err(Error::Format(format!("no recheck for certificate kind '{other}'"))),
    };
    let mut mismatches = Vec::new();
    for new in &recomputed.conclusions {
        match cert.get(&new.name) {
            None => mismatches.push(format!("{}: missing from certificate", new.name)),
            Some(old) => {
                if old.pass != new.pass {
                    mismatches.push(format!("{}: stored {} but recheck gives {}", new.name, verdict(old.pass), verdict(new.pass)));
                }
                if !close(old.achieved_value, new.achieved_value) || !close(old.claimed_bound, new.claimed_bound) {
                    mismatches.push(format!(
                        "{}: stored {:e} vs recomputed {:e}",
                        new.name, old.achieved_value, new.achieved_value
                    ));
                }
            }
        }
    }
    for old in &cert.conclusions {
        if recomputed.get(&old.name).is_none() {
            mismatches.push(format!("{}: not a conclusion of a {} certificate", old.name, cert.kind));
        }
    }
    Ok(VerifyReport { recomputed, mismatches })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= VALUE_REL_TOL * a.abs().max(b.abs()) || (a.is_nan() && b.is_nan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adic::{AdicInterval, Config};
    use num_complex::Complex64;

    #[test]
    fn lemma1_round_trip_and_tamper() {
        let config = Config::for_order(2).unwrap();
        let d = AdicInterval::from_cell(2, 1, 0).unwrap();
        let r = lemma1::lemma1_construct(Complex64::new(1.0, 0.0), 2, 0.25, &d, &config).unwrap();
        assert!(verify(&r.certificate).unwrap().passed());

        let mut bad = r.certificate.clone();
        let c = bad.conclusions.iter_mut().find(|c| c.name == "l1_upper").unwrap();
        c.achieved_value *= 1.5;
        let report = verify(&bad).unwrap();
        assert!(!report.passed());
        assert_eq!(report.mismatches.len(), 1);

        let mut unknown = r.certificate.clone();
        unknown.kind = "other".into();
        assert!(verify(&unknown).is_err());
    }
}
