//! Propositional baseline: table factors, brute-force partition function,
//! dtrees with cutset/context/cluster, and dtree-driven variable elimination.

mod dtree;
mod factor;

pub use dtree::{dtree_properties, ve_over_dtree, Dtree, DtreeNode, DtreeProps};
pub use factor::{multiply, multiply_all, sum_out, Factor, Work};

use crate::error::{Error, Result};
use crate::model::{strides, unravel};

/// Default randvar cap for brute-force enumeration.
pub const DEFAULT_CAP: usize = 25;

fn check_cap(cards: &[usize], cap: usize) -> Result<()> {
    if cards.len() > cap {
        return Err(Error::CapExceeded { count: cards.len(), cap });
    }
    Ok(())
}

fn partial_sum(factors: &[Factor], cards: &[usize], range: std::ops::Range<usize>) -> f64 {
    let fstrides: Vec<Vec<usize>> = factors.iter().map(|f| strides(&f.cards)).collect();
    let mut vals = vec![0; cards.len()];
    let mut total = 0.0;
    for idx in range {
        unravel(idx, cards, &mut vals);
        let mut p = 1.0;
        for (f, s) in factors.iter().zip(&fstrides) {
            let j: usize = f.vars.iter().zip(s).map(|(&v, &st)| vals[v] * st).sum();
            p *= f.table[j];
            if p == 0.0 {
                break;
            }
        }
        total += p;
    }
    total
}

/// Exact sum over all joint assignments of the product of all factors.
/// `cards[v]` is the range size of randvar `v`.
pub fn brute_force_z(factors: &[Factor], cards: &[usize], cap: usize) -> Result<f64> {
    #[cfg(feature = "parallel")]
    {
        brute_force_z_par(factors, cards, cap)
    }
    #[cfg(not(feature = "parallel"))]
    {
        brute_force_z_seq(factors, cards, cap)
    }
}

pub fn brute_force_z_seq(factors: &[Factor], cards: &[usize], cap: usize) -> Result<f64> {
    check_cap(cards, cap)?;
    let size: usize = cards.iter().product();
    Ok(partial_sum(factors, cards, 0..size))
}

#[cfg(feature = "parallel")]
pub fn brute_force_z_par(factors: &[Factor], cards: &[usize], cap: usize) -> Result<f64> {
    use rayon::prelude::*;
    check_cap(cards, cap)?;
    let size: usize = cards.iter().product();
    const CHUNK: usize = 1 << 12;
    let chunks = size.div_ceil(CHUNK);
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| partial_sum(factors, cards, c * CHUNK..((c + 1) * CHUNK).min(size)))
        .collect();
    // fixed-order reduction keeps the result independent of scheduling
    Ok(parts.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_factor() {
        let f = Factor::new(vec![0], vec![2], vec![2.0, 3.0]);
        assert_eq!(brute_force_z(&[f], &[2], DEFAULT_CAP).unwrap(), 5.0);
    }

    #[test]
    fn cap_is_enforced() {
        let cards = vec![2; 30];
        assert!(matches!(brute_force_z(&[], &cards, DEFAULT_CAP), Err(Error::CapExceeded { count: 30, cap: 25 })));
    }

    #[test]
    fn sequential_and_default_agree() {
        let fs = vec![
            Factor::new(vec![0, 1], vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]),
            Factor::new(vec![1, 2], vec![2, 3], vec![0.5, 1.5, 2.5, 3.5, 4.5, 5.5]),
        ];
        let cards = [2, 2, 3];
        let a = brute_force_z_seq(&fs, &cards, DEFAULT_CAP).unwrap();
        let b = brute_force_z(&fs, &cards, DEFAULT_CAP).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }
}
