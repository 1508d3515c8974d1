//! Random small models for testing.

use fodtree::model::{Atom, Constraint, Domain, Model, Parfactor, PredDecl, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One domain of 2 to 4 people, up to three predicates and one to three
/// parfactors over `X` and `Y`, tables drawn from [0.1, 10].
pub fn random_model(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let person = "Person".to_string();
    let domain = Domain::numbered(person.clone(), rng.gen_range(2..=4));
    let mut preds = vec![PredDecl::boolean("Smokes", vec![person.clone()])];
    if rng.gen_bool(0.5) {
        preds.push(PredDecl::boolean("Cancer", vec![person.clone()]));
    }
    if rng.gen_bool(0.7) {
        preds.push(PredDecl::boolean("Friends", vec![person.clone(), person.clone()]));
    }
    let x = Term::var("X", person.clone());
    let y = Term::var("Y", person.clone());
    let mut parfactors = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let n_atoms = rng.gen_range(1..=3);
        let mut atoms: Vec<Atom> = Vec::new();
        for _ in 0..n_atoms {
            let p = preds.choose(&mut rng).unwrap();
            let args = if p.args.len() == 2 {
                if rng.gen_bool(0.5) {
                    vec![x.clone(), y.clone()]
                } else {
                    vec![y.clone(), x.clone()]
                }
            } else if rng.gen_bool(0.6) {
                vec![x.clone()]
            } else {
                vec![y.clone()]
            };
            let a = Atom::new(p.name.clone(), args);
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
        let mut constraint = Constraint::new();
        let uses = |t: &Term| atoms.iter().any(|a| a.mentions(t));
        if uses(&x) && uses(&y) {
            constraint.insert(x.clone(), y.clone());
        }
        let table = (0..1usize << atoms.len()).map(|_| (rng.gen_range(0.1..10.0f64) * 100.0).round() / 100.0).collect();
        parfactors.push(Parfactor { atoms, constraint, table });
    }
    Model { domains: vec![domain], preds, parfactors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_model() {
        assert_eq!(random_model(7), random_model(7));
        assert!(random_model(7).check().is_ok());
    }
}
