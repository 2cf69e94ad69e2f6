//! One series that corrects the first dictionary elements in turn.

use chrestenson::correction::{universal_series, BudgetProfile, WalshIndex};
use chrestenson::Config;

fn main() -> chrestenson::Result<()> {
    let config = Config::for_order(2)?;
    let s = universal_series(0.9, 3, &WalshIndex::from_u64(2, 2), BudgetProfile::Geometric, &config)?;
    for step in &s.steps {
        let values: Vec<String> = step.element.values.iter().map(|v| v.to_string()).collect();
        let blocks = step.result.as_ref().map_or(0, |r| r.blocks().len());
        println!("element {}: level {} values {:?} -> {blocks} blocks", step.n, step.element.level, values);
    }
    println!("|E| >= {:.6}", s.kept_measure().to_f64());
    print!("{}", s.certificate);

    let deeper = universal_series(0.9, 6, &WalshIndex::from_u64(2, 2), BudgetProfile::Geometric, &config);
    if let Err(e) = deeper {
        println!("six elements: {e}");
    }
    Ok(())
}
