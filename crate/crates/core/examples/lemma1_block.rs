//! A kernel polynomial equal to `γ` on most of one interval and zero outside.

use chrestenson::correction::lemma1_construct;
use chrestenson::{AdicInterval, Config};
use num_complex::Complex64;

fn main() -> chrestenson::Result<()> {
    let config = Config::for_order(2)?;
    let interval = AdicInterval::new(2, 1, 1)?;
    let r = lemma1_construct(Complex64::new(1.0, 0.0), 2, 0.4, &interval, &config)?;
    println!("nu0 = {}, s = {}, N = {}", r.nu0, r.s, r.n_max);
    println!("|E| = {}, |c_n| = {}", r.kept_set.measure(), r.coeff_magnitude);
    for (n, c) in r.polynomial.terms() {
        println!("  n = {n:>2}: {:+.4}", c);
    }
    print!("{}", r.certificate);

    // complex γ on a ternary interval
    let config = Config::for_order(3)?;
    let interval = AdicInterval::new(3, 2, 4)?;
    let r = lemma1_construct(Complex64::new(0.0, 2.5), 10, 0.1, &interval, &config)?;
    println!("a=3: {} terms in [{}, {}], passed: {}", r.polynomial.terms().len(), 10, r.n_max, r.certificate.passed());
    Ok(())
}
