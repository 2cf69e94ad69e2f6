//! Constructive correction: single-interval kernel polynomials, whole-function
//! correctors with monotone coefficient magnitudes, and the iterative driver.

pub mod block;
pub mod certificate;
pub mod driver;
pub mod index;
pub mod lemma1;
pub mod lemma2;
pub mod polynomial;
pub mod step;
pub mod universal;
pub mod verify;

pub use block::{CorrectedFunction, KeptSet, KernelBlock};
pub use certificate::{Certificate, Conclusion, Relation};
pub use driver::{correct_function, BudgetProfile, CorrectionResult, DriverOptions, SelectionMode};
pub use index::WalshIndex;
pub use lemma1::{lemma1_construct, Lemma1Result};
pub use lemma2::{lemma2_construct, Lemma2Result};
pub use step::{step_approximate, StepApproximation};
pub use polynomial::WalshPolynomial;
pub use universal::{universal_series, UniversalSeries};
pub use verify::{verify, VerifyReport};
