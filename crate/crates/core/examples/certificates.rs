//! Certificates survive a JSON round trip byte for byte, recheck cleanly,
//! and a single altered value is caught.

use chrestenson::correction::{lemma1_construct, verify};
use chrestenson::{io, AdicInterval, Config};
use num_complex::Complex64;

fn main() -> chrestenson::Result<()> {
    let config = Config::for_order(2)?;
    let r = lemma1_construct(Complex64::new(1.0, 0.0), 2, 0.4, &AdicInterval::new(2, 1, 1)?, &config)?;
    let text = io::to_string(&io::certificate_to_json(&r.certificate))?;
    let back = io::certificate_from_json(&serde_json::from_str(&text)?)?;
    let again = io::to_string(&io::certificate_to_json(&back))?;
    println!("{} bytes, byte-stable: {}", text.len(), text == again);
    println!("verifies: {}", verify(&back)?.passed());

    let mut tampered = back.clone();
    if let Some(c) = tampered.conclusions.iter_mut().find(|c| c.name == "kept_measure") {
        c.achieved_value = 0.5;
    }
    let report = verify(&tampered)?;
    println!("tampered verifies: {}", report.passed());
    for m in &report.mismatches {
        println!("  {m}");
    }
    Ok(())
}
