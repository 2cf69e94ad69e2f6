//! Fast analysis of a step function, checked against the naive sum and
//! inverted again.

use chrestenson::generate::Generator;
use chrestenson::{analyze, synthesize, Method, Norm};

fn main() -> chrestenson::Result<()> {
    let f = Generator::Random.build(3, 4, 42)?;
    let fast = analyze(&f, Method::Fast)?;
    let naive = analyze(&f, Method::Naive)?;
    let gap = fast
        .coefficients()
        .iter()
        .zip(naive.coefficients())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    println!("a=3, J=4: {} coefficients, fast vs naive max gap {gap:.2e}", fast.coefficients().len());

    let back = synthesize(&fast, 4)?;
    println!("round trip L2 error {:.2e}", back.sub(&f)?.norm(Norm::L2));
    println!("energy {:.12} vs ||f||_2^2 {:.12}", fast.energy(), f.norm(Norm::L2).powi(2));
    for n in 0..5 {
        println!("  c_{n} = {:.6}", fast.get(n));
    }
    Ok(())
}
