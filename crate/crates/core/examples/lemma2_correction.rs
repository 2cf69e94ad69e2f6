//! Correcting a whole step function: blocks of equal-modulus coefficients
//! with non-increasing moduli and increasing index ranges.

use chrestenson::correction::{lemma2_construct, WalshIndex};
use chrestenson::generate::Generator;
use chrestenson::{Config, Norm};

fn main() -> chrestenson::Result<()> {
    let f = Generator::Centered.build(2, 3, 0)?;
    let config = Config::for_order(2)?;
    let r = lemma2_construct(&f, &WalshIndex::from_u64(2, 2), 0.3, &config)?;
    println!("||f||_1 = {:.6}, nu0 = {}, {} blocks", f.norm(Norm::L1), r.nu0, r.blocks().len());
    for b in r.blocks().iter().take(5) {
        println!(
            "  on {}:{}: gamma = {:+.4}, modulus {:.3e}, indices {} ..= {}",
            b.interval.level(),
            b.interval.index(),
            b.gamma.re,
            b.magnitude(),
            b.first_index(),
            b.last_index()
        );
    }
    println!("next free index: {}", r.next_n0);
    print!("{}", r.certificate);
    Ok(())
}
