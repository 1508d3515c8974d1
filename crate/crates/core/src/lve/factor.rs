use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::hist::{marginal_map, state_projection, HistSpace, Spaces};
use super::num::Ext;
use crate::analysis::{Axis, CountVar};
use crate::error::{Error, Result};
use crate::model::{strides, unravel, Model};
use crate::propositional::Work;

/// Table over atom and counting axes, row-major with the last axis fastest.
/// A counting axis is indexed by histogram position in its [`HistSpace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedFactor {
    pub axes: Vec<Axis>,
    pub dims: Vec<usize>,
    pub table: Vec<Ext>,
}

impl LiftedFactor {
    pub fn scalar(value: f64) -> Self {
        Self { axes: Vec::new(), dims: Vec::new(), table: vec![Ext::new(value)] }
    }

    pub fn position(&self, axis: &Axis) -> Option<usize> {
        self.axes.iter().position(|a| a == axis)
    }
}

/// Shared state for one run: model ranges, histogram spaces and the work counter.
pub struct Engine<'a> {
    pub model: &'a Model,
    pub spaces: Spaces,
    pub work: Work,
    pub parallel: bool,
}

impl<'a> Engine<'a> {
    pub fn new(model: &'a Model, parallel: bool) -> Self {
        Self { model, spaces: Spaces::default(), work: Work::default(), parallel }
    }

    pub fn space(&mut self, c: &CountVar) -> Arc<HistSpace> {
        let r = c.joint_range(self.model);
        self.spaces.get(c.size, r)
    }

    pub fn dim(&mut self, a: &Axis) -> usize {
        match a {
            Axis::Atom(atom) => self.model.range_size(&atom.pred),
            Axis::Count(c) => self.space(c).len(),
        }
    }

    pub fn dims(&mut self, axes: &[Axis]) -> Vec<usize> {
        axes.iter().map(|a| self.dim(a)).collect()
    }

    /// Table over `dims` with each entry computed from its axis values.
    pub fn fill<F>(&mut self, dims: &[usize], f: F) -> Vec<Ext>
    where
        F: Fn(&[usize]) -> Ext + Sync,
    {
        let size: usize = dims.iter().product();
        self.work.add(size);
        fill(dims, size, self.parallel, f)
    }

    /// Lookup from values of `target` axes to the index of each entry of `input`.
    pub fn index_map(&mut self, target: &[Axis], input: &[Axis]) -> Result<IndexMap> {
        let strides = strides(&self.dims(input));
        let mut parts = Vec::with_capacity(input.len());
        for (a, &stride) in input.iter().zip(&strides) {
            let (pos, lookup) = self.locate(target, a)?;
            parts.push(Part { pos, stride, lookup });
        }
        Ok(IndexMap { parts })
    }

    /// Where `a` lives among `target` and how a target value maps to a value of `a`.
    pub(crate) fn locate(&mut self, target: &[Axis], a: &Axis) -> Result<(usize, Option<Vec<usize>>)> {
        if let Some(p) = target.iter().position(|t| t == a) {
            return Ok((p, None));
        }
        if let Axis::Count(c) = a {
            for (p, t) in target.iter().enumerate() {
                if let Some(tc) = t.as_count() {
                    if let Some(map) = self.count_map(tc, c) {
                        return Ok((p, Some(map)));
                    }
                }
            }
        }
        Err(Error::Plan(format!("{} has no place in the target axes", describe(a))))
    }

    /// Histogram index map from `fine` to a counting randvar over a subset of its patterns.
    pub fn count_map(&mut self, fine: &CountVar, coarse: &CountVar) -> Option<Vec<usize>> {
        if fine.domain != coarse.domain || fine.excluded != coarse.excluded || fine.size != coarse.size {
            return None;
        }
        let pos: Vec<usize> =
            coarse.patterns.iter().map(|p| fine.patterns.iter().position(|q| q == p)).collect::<Option<_>>()?;
        let proj = state_projection(&(0..fine.patterns.len()).collect::<Vec<_>>(), &fine.ranges(self.model), &pos)?;
        let fs = self.space(fine);
        let cs = self.space(coarse);
        Some(marginal_map(&fs, &cs, &proj))
    }

    /// Pointwise product of `inputs` laid out over `target`.
    pub fn multiply_into(&mut self, target: &[Axis], inputs: &[&LiftedFactor]) -> Result<LiftedFactor> {
        check_covered(target, inputs.iter().flat_map(|f| f.axes.iter()))?;
        let maps: Vec<IndexMap> = inputs.iter().map(|f| self.index_map(target, &f.axes)).collect::<Result<_>>()?;
        let dims = self.dims(target);
        let table = self.fill(&dims, |vals| {
            let mut p = Ext::ONE;
            for (f, m) in inputs.iter().zip(&maps) {
                p *= f.table[m.index(vals)];
                if p.is_zero() {
                    break;
                }
            }
            p
        });
        Ok(LiftedFactor { axes: target.to_vec(), dims, table })
    }

    /// Sum out one axis; a counting axis is weighted by the multinomial of each histogram.
    pub fn sum_out(&mut self, f: &LiftedFactor, axis: &Axis) -> Result<LiftedFactor> {
        let i = f.position(axis).ok_or_else(|| Error::Plan(format!("{} is not an axis", describe(axis))))?;
        let weights: Vec<Ext> = match axis {
            Axis::Atom(_) => vec![Ext::ONE; f.dims[i]],
            Axis::Count(c) => self.space(c).mul.clone(),
        };
        let card = f.dims[i];
        let inner: usize = f.dims[i + 1..].iter().product();
        let mut axes = f.axes.clone();
        let mut dims = f.dims.clone();
        axes.remove(i);
        dims.remove(i);
        let table = self.fill(&dims, |vals| {
            let o: usize = vals[..i].iter().zip(&dims[..i]).fold(0, |acc, (&v, &d)| acc * d + v);
            let r: usize = vals[i..].iter().zip(&dims[i..]).fold(0, |acc, (&v, &d)| acc * d + v);
            (0..card).map(|k| weights[k] * f.table[(o * card + k) * inner + r]).sum()
        });
        Ok(LiftedFactor { axes, dims, table })
    }
}

/// Every target atom is an input axis and every target pattern is counted by some input.
pub(crate) fn check_covered<'x>(target: &[Axis], used: impl Iterator<Item = &'x Axis>) -> Result<()> {
    let used: Vec<&Axis> = used.collect();
    for t in target {
        let ok = match t {
            Axis::Atom(_) => used.contains(&t),
            Axis::Count(tc) => tc.patterns.iter().all(|p| {
                used.iter()
                    .filter_map(|u| u.as_count())
                    .any(|c| c.domain == tc.domain && c.excluded == tc.excluded && c.patterns.contains(p))
            }),
        };
        if !ok {
            return Err(Error::Plan(format!("{} is not covered by any input", describe(t))));
        }
    }
    Ok(())
}

pub(crate) fn describe(a: &Axis) -> String {
    match a {
        Axis::Atom(atom) => atom.to_string(),
        Axis::Count(c) => c.to_string(),
    }
}

pub(crate) struct Part {
    pub(crate) pos: usize,
    pub(crate) stride: usize,
    pub(crate) lookup: Option<Vec<usize>>,
}

impl Part {
    pub(crate) fn offset(&self, vals: &[usize]) -> usize {
        let v = vals[self.pos];
        self.stride * self.lookup.as_ref().map_or(v, |l| l[v])
    }
}

/// Flat index of an input entry from the values of the target axes.
pub struct IndexMap {
    parts: Vec<Part>,
}

impl IndexMap {
    pub fn index(&self, vals: &[usize]) -> usize {
        self.parts.iter().map(|p| p.offset(vals)).sum()
    }
}

const PAR_MIN: usize = 4096;

fn fill<F>(dims: &[usize], size: usize, parallel: bool, f: F) -> Vec<Ext>
where
    F: Fn(&[usize]) -> Ext + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel && size >= PAR_MIN {
        use rayon::prelude::*;
        return (0..size)
            .into_par_iter()
            .map_init(
                || vec![0; dims.len()],
                |vals, i| {
                    unravel(i, dims, vals);
                    f(vals)
                },
            )
            .collect();
    }
    let _ = (parallel, PAR_MIN);
    let mut vals = vec![0; dims.len()];
    (0..size)
        .map(|i| {
            unravel(i, dims, &mut vals);
            f(&vals)
        })
        .collect()
}
