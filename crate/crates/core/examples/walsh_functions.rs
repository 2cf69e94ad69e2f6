//! Point values of generalized Walsh functions at exact rational points,
//! and the digit-reversal permutation the fast transform ends on.

use chrestenson::walsh::{digit_reversal, rademacher_eval, walsh_eval};
use chrestenson::AdicPoint;

fn main() -> chrestenson::Result<()> {
    let a = 3;
    let x = AdicPoint::from_ratio(a, 5, 9)?;
    println!("x = 5/9, base-{a} digits {:?}", x.digits(4));
    for k in 0..3 {
        let r = rademacher_eval(a, k, &x)?;
        println!("phi_{k}(x) = w^{} = {:.4}", r.exponent(), r.value());
    }
    for n in [0u64, 1, 2, 3, 5, 8, 26] {
        let p = walsh_eval(a, n, &x)?;
        println!("psi_{n}(x) = w^{}", p.exponent());
    }
    println!("digit reversal a=2, J=3: {:?}", digit_reversal(2, 3));
    println!("digit reversal a=3, J=2: {:?}", digit_reversal(3, 2));
    Ok(())
}
