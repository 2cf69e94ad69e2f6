//! A fixed enumeration of all step functions with rational values on a-adic
//! grids.
//!
//! Elements come in shells indexed by `(J, D)`: vectors of length `a^J` with
//! entries in `R_D = {p/q : |p| <= D, 1 <= q <= D}` that are not already
//! vectors over `R_{D-1}`. Shells are visited diagonally in `t = J + D`,
//! `J` ascending; inside a shell vectors run lexicographically over the sorted
//! `R_D`. Shell `(J, 0)` is the zero vector of level `J`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::adic::{check_order, checked_pow, StepFunction};
use crate::error::{Error, Result};

/// One dictionary element: exact rational values on the level-`level` grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DictionaryElement {
    pub order: u32,
    pub level: u32,
    pub values: Vec<BigRational>,
}

impl DictionaryElement {
    pub fn to_step(&self) -> Result<StepFunction> {
        let values = self
            .values
            .iter()
            .map(|v| Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0))
            .collect();
        StepFunction::new(self.order, self.level, values)
    }
}

/// Sorted `R_D`.
pub fn rational_grid(d: u32) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    for q in 1..=d as i64 {
        for p in -(d as i64)..=d as i64 {
            out.push(BigRational::new(BigInt::from(p), BigInt::from(q)));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Iterator over the dictionary in enumeration order (element 1 first).
#[derive(Debug, Clone)]
pub struct Dictionary {
    order: u32,
    t: u32,
    j: u32,
    grid: Vec<BigRational>,
    fresh: Vec<bool>,
    odometer: Option<Vec<usize>>,
}

impl Dictionary {
    pub fn new(order: u32) -> Result<Self> {
        check_order(order)?;
        let mut dict = Dictionary {
            order,
            t: 0,
            j: 0,
            grid: Vec::new(),
            fresh: Vec::new(),
            odometer: None,
        };
        dict.enter_shell();
        Ok(dict)
    }

    /// Current shell as `(J, D)`.
    pub fn shell(&self) -> (u32, u32) {
        (self.j, self.t - self.j)
    }

    fn enter_shell(&mut self) {
        let d = self.t - self.j;
        self.grid = rational_grid(d);
        self.fresh = if d == 0 {
            vec![true]
        } else {
            let prev = rational_grid(d - 1);
            self.grid.iter().map(|v| prev.binary_search(v).is_err()).collect()
        };
        let len = checked_pow(self.order, self.j).unwrap_or(u64::MAX) as usize;
        self.odometer = Some(vec![0; len]);
    }

    fn next_shell(&mut self) {
        if self.j < self.t {
            self.j += 1;
        } else {
            self.t += 1;
            self.j = 0;
        }
        self.enter_shell();
    }

    fn advance(&mut self) {
        let base = self.grid.len();
        let exhausted = match self.odometer.as_mut() {
            Some(od) => {
                let mut i = od.len();
                loop {
                    if i == 0 {
                        break true;
                    }
                    i -= 1;
                    od[i] += 1;
                    if od[i] < base {
                        break false;
                    }
                    od[i] = 0;
                }
            }
            None => true,
        };
        if exhausted {
            self.next_shell();
        }
    }
}

impl Iterator for Dictionary {
    type Item = DictionaryElement;

    fn next(&mut self) -> Option<DictionaryElement> {
        loop {
            let od = self.odometer.as_ref()?;
            let hit = od.iter().any(|&i| self.fresh[i]);
            let element = hit.then(|| DictionaryElement {
                order: self.order,
                level: self.j,
                values: od.iter().map(|&i| self.grid[i].clone()).collect(),
            });
            self.advance();
            if element.is_some() {
                return element;
            }
        }
    }
}

/// The `n`-th dictionary element, `n >= 1`.
pub fn dictionary_step(order: u32, n: u64) -> Result<DictionaryElement> {
    if n == 0 {
        return Err(Error::InvalidArgument("dictionary indices start at 1".into()));
    }
    Dictionary::new(order)?
        .nth((n - 1) as usize)
        .ok_or_else(|| Error::InvalidArgument(format!("dictionary element {n} unavailable")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(rational_grid(0), vec![r(0, 1)]);
        assert_eq!(rational_grid(1), vec![r(-1, 1), r(0, 1), r(1, 1)]);
        assert_eq!(rational_grid(2).len(), 7);
    }

    #[test]
    fn first_elements_by_hand() {
        let got: Vec<_> = Dictionary::new(2).unwrap().take(8).collect();
        assert_eq!((got[0].level, got[0].values.clone()), (0, vec![r(0, 1)]));
        assert_eq!(got[1].values, vec![r(-1, 1)]);
        assert_eq!(got[2].values, vec![r(1, 1)]);
        assert_eq!((got[3].level, got[3].values.clone()), (1, vec![r(0, 1), r(0, 1)]));
        let fourth: Vec<_> = got[4..8].iter().map(|e| e.values[0].clone()).collect();
        assert_eq!(fourth, vec![r(-2, 1), r(-1, 2), r(1, 2), r(2, 1)]);
        assert_eq!(dictionary_step(2, 1).unwrap().level, 0);
        assert!(dictionary_step(2, 0).is_err());
    }

    #[test]
    fn injective_over_first_thousand() {
        for a in [2u32, 3] {
            let seen: HashSet<_> = Dictionary::new(a)
                .unwrap()
                .take(1000)
                .map(|e| (e.level, e.values))
                .collect();
            assert_eq!(seen.len(), 1000);
        }
    }

    #[test]
    fn elements_are_finite_steps() {
        for e in Dictionary::new(3).unwrap().take(200) {
            let f = e.to_step().unwrap();
            assert!(f.values().iter().all(|v| v.re.is_finite()));
        }
    }
}
