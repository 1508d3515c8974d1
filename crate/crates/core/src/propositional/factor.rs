use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{strides, unravel};

/// Table factor over ground randvar ids. Row-major, last variable fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub vars: Vec<usize>,
    pub cards: Vec<usize>,
    pub table: Vec<f64>,
}

impl Factor {
    pub fn new(vars: Vec<usize>, cards: Vec<usize>, table: Vec<f64>) -> Self {
        debug_assert_eq!(vars.len(), cards.len());
        debug_assert_eq!(table.len(), cards.iter().product::<usize>());
        Self { vars, cards, table }
    }

    pub fn scalar(value: f64) -> Self {
        Self { vars: vec![], cards: vec![], table: vec![value] }
    }

    pub fn constant(vars: Vec<usize>, cards: Vec<usize>, value: f64) -> Self {
        let size = cards.iter().product();
        Self { vars, cards, table: vec![value; size] }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Running count of table entries written by factor operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Work(pub u64);

impl Work {
    pub fn add(&mut self, entries: usize) {
        self.0 += entries as u64;
    }
}

/// Pointwise product over the union of the scopes (first factor's order, then new vars).
pub fn multiply(f1: &Factor, f2: &Factor, work: &mut Work) -> Result<Factor> {
    multiply_all(&[f1, f2], work)
}

/// n-ary product written in a single pass.
pub fn multiply_all(factors: &[&Factor], work: &mut Work) -> Result<Factor> {
    let mut vars: Vec<usize> = Vec::new();
    let mut cards: Vec<usize> = Vec::new();
    for f in factors {
        for (&v, &c) in f.vars.iter().zip(&f.cards) {
            match vars.iter().position(|&u| u == v) {
                Some(i) if cards[i] != c => return Err(Error::RangeMismatch(format!("randvar {v}"))),
                Some(_) => {}
                None => {
                    vars.push(v);
                    cards.push(c);
                }
            }
        }
    }
    let size: usize = cards.iter().product();
    let maps: Vec<(Vec<usize>, Vec<usize>)> = factors
        .iter()
        .map(|f| {
            let s = strides(&f.cards);
            let pos = f.vars.iter().map(|v| vars.iter().position(|u| u == v).unwrap()).collect();
            (pos, s)
        })
        .collect();
    let mut vals = vec![0; vars.len()];
    let mut table = Vec::with_capacity(size);
    for idx in 0..size {
        unravel(idx, &cards, &mut vals);
        let mut p = 1.0;
        for (f, (pos, s)) in factors.iter().zip(&maps) {
            let j: usize = pos.iter().zip(s).map(|(&i, &st)| vals[i] * st).sum();
            p *= f.table[j];
        }
        table.push(p);
    }
    work.add(size);
    Ok(Factor { vars, cards, table })
}

/// Marginalize `v` by addition.
pub fn sum_out(f: &Factor, v: usize, work: &mut Work) -> Result<Factor> {
    let axis = f.vars.iter().position(|&u| u == v).ok_or_else(|| Error::MissingVar(v.to_string()))?;
    let card = f.cards[axis];
    let inner: usize = f.cards[axis + 1..].iter().product();
    let outer: usize = f.cards[..axis].iter().product();
    let mut table = vec![0.0; outer * inner];
    for o in 0..outer {
        for k in 0..card {
            let base = (o * card + k) * inner;
            for i in 0..inner {
                table[o * inner + i] += f.table[base + i];
            }
        }
    }
    let mut vars = f.vars.clone();
    let mut cards = f.cards.clone();
    vars.remove(axis);
    cards.remove(axis);
    work.add(table.len());
    Ok(Factor { vars, cards, table })
}
