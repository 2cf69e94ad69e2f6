//! The enumeration of rational step functions used by the universal series.

use chrestenson::dictionary::{dictionary_step, rational_grid, Dictionary};

fn main() -> chrestenson::Result<()> {
    let grid: Vec<String> = rational_grid(2).iter().map(|r| r.to_string()).collect();
    println!("R_2 = {grid:?}");
    for (n, e) in Dictionary::new(2)?.take(12).enumerate() {
        let values: Vec<String> = e.values.iter().map(|v| v.to_string()).collect();
        println!("{:>3}: level {} {:?}", n + 1, e.level, values);
    }
    let e = dictionary_step(3, 100)?;
    println!("a=3, element 100: level {}, {} values", e.level, e.values.len());
    Ok(())
}
