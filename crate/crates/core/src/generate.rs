//! Builtin test functions, projected exactly onto a level-`J` grid.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adic::{checked_pow, StepFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Cell averages of `x`.
    Linear,
    /// Cell averages of `x - 1/2`.
    Centered,
    /// Cell averages of `sign(x - 1/3)`.
    Sign,
    /// Independent uniform values in `[-1, 1]`, drawn from the seed.
    Random,
}

impl Generator {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Generator::Linear),
            "centered" => Ok(Generator::Centered),
            "sign" => Ok(Generator::Sign),
            "rand" | "random" => Ok(Generator::Random),
            other => Err(Error::InvalidArgument(format!("unknown generator '{other}'"))),
        }
    }

    pub fn build(self, order: u32, level: u32, seed: u64) -> Result<StepFunction> {
        let n = checked_pow(order, level).ok_or(Error::Resolution {
            needed: level as u64,
            max: 0,
        })?;
        let w = 1.0 / n as f64;
        let values: Vec<f64> = match self {
            Generator::Linear => (0..n).map(|c| (c as f64 + 0.5) * w).collect(),
            Generator::Centered => (0..n).map(|c| (c as f64 + 0.5) * w - 0.5).collect(),
            Generator::Sign => (0..n)
                .map(|c| {
                    let (l, r) = (c as f64 * w, (c + 1) as f64 * w);
                    let t = (1.0 / 3.0f64).clamp(l, r);
                    ((r - t) - (t - l)) / w
                })
                .collect(),
            Generator::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
            }
        };
        StepFunction::new(order, level, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adic::Norm;

    #[test]
    fn examples() {
        let f = Generator::Linear.build(2, 2, 0).unwrap();
        assert_eq!(f.values()[0].re, 0.125);
        assert_eq!(Generator::Centered.build(2, 1, 0).unwrap().values()[1].re, 0.25);
        let s = Generator::Sign.build(3, 1, 0).unwrap();
        assert_eq!(s.values()[0].re, -1.0);
        assert_eq!(s.values()[1].re, 1.0);
        let s = Generator::Sign.build(2, 1, 0).unwrap();
        assert!((s.values()[0].re + 1.0 / 3.0).abs() < 1e-15);
        let a = Generator::Random.build(3, 2, 7).unwrap();
        assert_eq!(a, Generator::Random.build(3, 2, 7).unwrap());
        assert_ne!(a, Generator::Random.build(3, 2, 8).unwrap());
        assert!(a.norm(Norm::Sup) <= 1.0);
        assert!(Generator::parse("cos").is_err());
    }
}
