//! The iterated corrector under each budget profile. The verbatim budgets
//! ask for more blocks than any machine holds and are reported as such.

use chrestenson::correction::{correct_function, BudgetProfile, DriverOptions};
use chrestenson::generate::Generator;
use chrestenson::Config;

fn main() -> chrestenson::Result<()> {
    let f = Generator::Linear.build(2, 4, 0)?;
    let config = Config::for_order(2)?;
    for profile in [BudgetProfile::Verbatim, BudgetProfile::Relaxed, BudgetProfile::Geometric] {
        let opts = DriverOptions {
            profile,
            ..DriverOptions::new(0.25, 1e-3)
        };
        match correct_function(&f, &opts, &config) {
            Ok(r) => {
                println!("{}: {} step(s), {} blocks", profile.name(), r.steps.len(), r.g.blocks.len());
                for t in &r.trace {
                    println!(
                        "  q={} eps_q={:.2e} residual={:.2e} moduli {:.2e}..{:.2e} prefix<={:.4}",
                        t.q, t.step_eps, t.residual_l1, t.block_magnitude.0, t.block_magnitude.1, t.partial_sum_sup_l1
                    );
                }
                print!("{}", r.certificate);
            }
            Err(e) => println!("{}: {e}", profile.name()),
        }
    }
    Ok(())
}
