//! Greedy m-term errors of `sign(x - 1/3)` in L1 and L2, as CSV.

use chrestenson::generate::Generator;
use chrestenson::greedy::{curve_csv, greedy_error_curve, greedy_order};
use chrestenson::{analyze, Method, Norm};

fn main() -> chrestenson::Result<()> {
    let f = Generator::Sign.build(2, 6, 0)?;
    let spec = analyze(&f, Method::Fast)?;
    let order = greedy_order(&spec);
    println!("largest coefficients: {:?}", &order.ranked[..order.len().min(6)]);

    let l1 = greedy_error_curve(&f, 16, Norm::L1)?;
    print!("{}", curve_csv(&l1));
    let l2 = greedy_error_curve(&f, usize::MAX, Norm::L2)?;
    let last = l2.last().expect("m = 0 is always present");
    println!("L2 error with all {} terms: {:.2e}", last.m, last.error);
    Ok(())
}
