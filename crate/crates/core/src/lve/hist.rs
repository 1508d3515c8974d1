use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use super::num::Ext;

/// All histograms of `n` objects over `r` joint states, in lexicographic order.
#[derive(Debug)]
pub struct HistSpace {
    pub n: usize,
    pub r: usize,
    pub hists: Vec<Vec<usize>>,
    /// Number of assignments realizing each histogram.
    pub mul: Vec<Ext>,
    index: HashMap<Vec<usize>, usize>,
}

impl HistSpace {
    pub fn new(n: usize, r: usize) -> Self {
        fn go(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if slots == 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for v in 0..=left {
                cur.push(v);
                go(left - v, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut hists = Vec::new();
        if r > 0 {
            go(n, r, &mut Vec::with_capacity(r), &mut hists);
        } else if n == 0 {
            hists.push(Vec::new());
        }
        let mut fact = vec![BigUint::one()];
        for i in 1..=n {
            let next = &fact[i - 1] * BigUint::from(i);
            fact.push(next);
        }
        let multinomial = |h: &Vec<usize>| Ext::from_biguint(&h.iter().fold(fact[n].clone(), |acc, &c| acc / &fact[c]));
        let mul = hists.iter().map(multinomial).collect();
        let index = hists.iter().enumerate().map(|(i, h)| (h.clone(), i)).collect();
        Self { n, r, hists, mul, index }
    }

    pub fn len(&self) -> usize {
        self.hists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hists.is_empty()
    }

    pub fn index_of(&self, h: &[usize]) -> Option<usize> {
        self.index.get(h).copied()
    }
}

/// Shared cache of histogram spaces keyed by `(n, r)`.
#[derive(Debug, Default)]
pub struct Spaces {
    cache: HashMap<(usize, usize), Arc<HistSpace>>,
}

impl Spaces {
    pub fn get(&mut self, n: usize, r: usize) -> Arc<HistSpace> {
        self.cache.entry((n, r)).or_insert_with(|| Arc::new(HistSpace::new(n, r))).clone()
    }
}

/// For each fine joint state, the coarse joint state it projects to.
///
/// `fine` and `coarse` list pattern positions; every coarse position must
/// appear in `fine`. Ranges are per position, row-major, last fastest.
pub fn state_projection(fine: &[usize], fine_ranges: &[usize], coarse: &[usize]) -> Option<Vec<usize>> {
    let pos: Vec<usize> = coarse.iter().map(|c| fine.iter().position(|f| f == c)).collect::<Option<_>>()?;
    let coarse_ranges: Vec<usize> = pos.iter().map(|&i| fine_ranges[i]).collect();
    let total: usize = fine_ranges.iter().product();
    let mut vals = vec![0; fine.len()];
    Some(
        (0..total)
            .map(|s| {
                crate::model::unravel(s, fine_ranges, &mut vals);
                pos.iter().zip(&coarse_ranges).fold(0, |acc, (&i, &r)| acc * r + vals[i])
            })
            .collect(),
    )
}

/// Histogram over coarse states induced by a fine histogram.
pub fn marginal(h: &[usize], proj: &[usize], coarse_r: usize) -> Vec<usize> {
    let mut out = vec![0; coarse_r];
    for (s, &c) in h.iter().enumerate() {
        out[proj[s]] += c;
    }
    out
}

/// Index map from each histogram of `fine` to its marginal in `coarse`.
pub fn marginal_map(fine: &HistSpace, coarse: &HistSpace, proj: &[usize]) -> Vec<usize> {
    fine.hists
        .iter()
        .map(|h| coarse.index_of(&marginal(h, proj, coarse.r)).expect("marginal has the same population"))
        .collect()
}
