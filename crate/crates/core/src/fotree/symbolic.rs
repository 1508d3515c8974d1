//! Constrained atoms and exact set operations on the ground randvars they denote.
//!
//! A [`CAtom`] is an atom whose arguments may be logvars, objects or
//! representative objects, together with inequalities. Under a fixed
//! assignment of the in-scope representatives it denotes the set of ground
//! atoms obtained from all constraint-satisfying substitutions of its logvars
//! (including logvars that occur only in the constraint).
//!
//! Every logvar implicitly ranges over the domain minus the model's relevant
//! constants, which is how logvars look after normalization. Representatives
//! in scope are distinct from each other and from those constants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Universe;
use crate::model::{Atom, Constraint, Substitution, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CAtom {
    pub atom: Atom,
    pub neq: Constraint,
}

/// A finite union of constrained atoms.
pub type SymSet = Vec<CAtom>;

impl CAtom {
    pub fn plain(atom: Atom) -> Self {
        Self { atom, neq: Constraint::new() }
    }

    pub fn new(atom: Atom, neq: Constraint) -> Self {
        Self { atom, neq }
    }

    /// Logvars in argument order, without repeats.
    pub fn arg_vars(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        for t in &self.atom.args {
            if t.is_var() && !out.contains(t) {
                out.push(t.clone());
            }
        }
        out
    }

    pub fn all_vars(&self) -> BTreeSet<Term> {
        let mut out: BTreeSet<Term> = self.atom.args.iter().filter(|t| t.is_var()).cloned().collect();
        for (a, b) in self.neq.iter() {
            for t in [a, b] {
                if t.is_var() {
                    out.insert(t.clone());
                }
            }
        }
        out
    }

    /// Logvars that occur only in the constraint.
    pub fn existentials(&self) -> BTreeSet<Term> {
        let args = self.arg_vars();
        self.all_vars().into_iter().filter(|v| !args.contains(v)).collect()
    }

    pub fn is_ground(&self) -> bool {
        self.atom.args.iter().all(|t| !t.is_var())
    }

    pub fn mentions(&self, t: &Term) -> bool {
        self.atom.mentions(t) || self.neq.iter().any(|(a, b)| a == t || b == t)
    }

    /// Apply a substitution; `None` if a constraint collapses to `t != t`.
    pub fn apply(&self, theta: &Substitution) -> Option<CAtom> {
        let neq = self.neq.substitute(theta)?;
        Some(CAtom { atom: self.atom.substitute(theta), neq: drop_trivial(&neq) })
    }

    pub fn with(&self, a: Term, b: Term) -> CAtom {
        let mut out = self.clone();
        out.neq.insert(a, b);
        out
    }

    /// Variable names replaced positionally, used as a dedup key.
    pub fn canonical(&self) -> CAtom {
        let mut order = self.arg_vars();
        order.extend(self.existentials());
        let theta = Substitution::from_pairs(
            order.iter().enumerate().map(|(i, v)| (v.clone(), Term::var(format!("_{i}"), v.domain()))),
        );
        self.apply(&theta).expect("renaming is injective")
    }

    /// Rename logvars whose names appear in `avoid` (or collide after renaming).
    pub fn rename_apart(&self, avoid: &BTreeSet<String>) -> CAtom {
        let mut taken: BTreeSet<String> = avoid.clone();
        let vars = self.all_vars();
        taken.extend(vars.iter().map(|v| v.name().to_string()));
        let mut theta = Substitution::new();
        for v in vars {
            if avoid.contains(v.name()) {
                let name = fresh_name(v.name(), &taken);
                taken.insert(name.clone());
                theta.insert(v.clone(), Term::var(name, v.domain()));
            }
        }
        self.apply(&theta).expect("renaming is injective")
    }

    pub fn var_names(&self) -> BTreeSet<String> {
        self.all_vars().into_iter().map(|v| v.name().to_string()).collect()
    }
}

impl fmt::Display for CAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.neq.is_empty() {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "{} | {}", self.atom, self.neq)
        }
    }
}

pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Pairs between two distinct non-logvar terms always hold.
fn drop_trivial(c: &Constraint) -> Constraint {
    let mut out = Constraint::new();
    for (a, b) in c.iter() {
        if a.is_var() || b.is_var() {
            out.insert(a.clone(), b.clone());
        }
    }
    out
}

/// Where a set operation is evaluated: the model's sizes and the representatives in scope.
#[derive(Clone, Copy, Debug)]
pub struct Ctx<'a> {
    pub universe: &'a Universe,
    pub params: &'a [Term],
}

impl Ctx<'_> {
    fn params_in(&self, domain: &str) -> Vec<&Term> {
        self.params.iter().filter(|p| p.domain() == domain).collect()
    }
}

/// Whether some assignment of the logvars satisfies the constraint.
pub fn satisfiable(ca: &CAtom, ctx: Ctx<'_>) -> bool {
    let vars: Vec<Term> = ca.all_vars().into_iter().collect();
    let domains: BTreeSet<String> = vars.iter().map(|v| v.domain().to_string()).collect();
    domains.iter().all(|d| {
        let dv: Vec<&Term> = vars.iter().filter(|v| v.domain() == d).collect();
        let params = ctx.params_in(d);
        let pool = ctx.universe.free_objects(d).saturating_sub(params.len());
        let fixed: Vec<Term> = params.into_iter().cloned().collect();
        assign(&dv, &ca.neq, &fixed, pool, &mut Vec::new())
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Fixed(usize),
    Fresh(usize),
}

/// Backtracking search; fresh values are symmetric so only `0..=max_used+1` are tried.
fn assign(vars: &[&Term], neq: &Constraint, fixed: &[Term], pool: usize, chosen: &mut Vec<Val>) -> bool {
    let i = chosen.len();
    if i == vars.len() {
        return true;
    }
    let v = vars[i];
    let clash = |val: Val, chosen: &[Val]| vars[..i].iter().zip(chosen).any(|(u, &w)| w == val && neq.contains(u, v));
    for (j, p) in fixed.iter().enumerate() {
        if neq.contains(v, p) || clash(Val::Fixed(j), chosen) {
            continue;
        }
        chosen.push(Val::Fixed(j));
        if assign(vars, neq, fixed, pool, chosen) {
            return true;
        }
        chosen.pop();
    }
    let used = chosen.iter().filter_map(|c| if let Val::Fresh(f) = c { Some(*f + 1) } else { None }).max().unwrap_or(0);
    for f in 0..pool.min(used + 1) {
        if clash(Val::Fresh(f), chosen) {
            continue;
        }
        chosen.push(Val::Fresh(f));
        if assign(vars, neq, fixed, pool, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Equivalent union of constrained atoms without constraint-only logvars,
/// each satisfiable. Empty if the input denotes nothing.
pub fn simplify(ca: &CAtom, ctx: Ctx<'_>) -> SymSet {
    let mut ca = ca.clone();
    ca.neq = drop_trivial(&ca.neq);
    if ca.neq.iter().any(|(a, b)| a == b) {
        return vec![];
    }
    let ex = ca.existentials();
    let Some(first) = ex.iter().next() else {
        return if satisfiable(&ca, ctx) { vec![ca] } else { vec![] };
    };
    let domain = first.domain().to_string();
    let ex: Vec<Term> = ex.into_iter().filter(|e| e.domain() == domain).collect();
    // implicit: logvars never take a constant
    let mut outer: Vec<Term> = Vec::new();
    for (a, b) in ca.neq.iter() {
        for (e, t) in [(a, b), (b, a)] {
            if ex.contains(e) && !ex.contains(t) && !t.is_obj() && !outer.contains(t) {
                outer.push(t.clone());
            }
        }
    }
    // decide equality between every pair of outer terms first
    for (i, s) in outer.iter().enumerate() {
        for t in &outer[i + 1..] {
            if !s.is_var() && !t.is_var() || ca.neq.contains(s, t) {
                continue;
            }
            let (v, to) = if s.is_var() { (s, t) } else { (t, s) };
            let mut out = match ca.apply(&Substitution::from_pairs([(v.clone(), to.clone())])) {
                Some(merged) => simplify(&merged, ctx),
                None => vec![],
            };
            out.extend(simplify(&ca.with(s.clone(), t.clone()), ctx));
            return dedup(out);
        }
    }
    let pool = ctx.universe.free_objects(&domain).saturating_sub(outer.len());
    let ex_refs: Vec<&Term> = ex.iter().collect();
    if !assign(&ex_refs, &ca.neq, &outer, pool, &mut Vec::new()) {
        return vec![];
    }
    let mut rest = Constraint::new();
    for (a, b) in ca.neq.iter() {
        if !ex.contains(a) && !ex.contains(b) {
            rest.insert(a.clone(), b.clone());
        }
    }
    simplify(&CAtom { atom: ca.atom, neq: rest }, ctx)
}

/// Most general unifier of two atoms with disjoint logvars. The returned
/// instance carries both constraints; the substitution maps every logvar of
/// either side to its class representative (an object, a representative,
/// or a logvar of `a` where possible).
pub(crate) fn unify(a: &CAtom, b: &CAtom) -> Option<(CAtom, Substitution)> {
    if a.atom.pred != b.atom.pred || a.atom.args.len() != b.atom.args.len() {
        return None;
    }
    let mut classes: Vec<Vec<Term>> = Vec::new();
    let find = |classes: &Vec<Vec<Term>>, t: &Term| classes.iter().position(|c| c.contains(t));
    for (s, t) in a.atom.args.iter().zip(&b.atom.args) {
        let (i, j) = (find(&classes, s), find(&classes, t));
        match (i, j) {
            (Some(i), Some(j)) if i == j => {}
            (Some(i), Some(j)) => {
                let moved = classes.remove(j.max(i));
                classes[j.min(i)].extend(moved);
            }
            (Some(i), None) => classes[i].push(t.clone()),
            (None, Some(j)) => classes[j].push(s.clone()),
            (None, None) => {
                if s == t {
                    classes.push(vec![s.clone()]);
                } else {
                    classes.push(vec![s.clone(), t.clone()]);
                }
            }
        }
    }
    let a_vars = a.arg_vars();
    let mut theta = Substitution::new();
    for class in &classes {
        let consts: BTreeSet<&Term> = class.iter().filter(|t| !t.is_var()).collect();
        if consts.len() > 1 {
            return None;
        }
        let rep = match consts.into_iter().next() {
            Some(c) => c.clone(),
            None => a_vars
                .iter()
                .find(|v| class.contains(v))
                .cloned()
                .unwrap_or_else(|| class.iter().min().unwrap().clone()),
        };
        for t in class {
            if t.is_var() && *t != rep {
                theta.insert(t.clone(), rep.clone());
            }
        }
    }
    let mut neq = a.neq.clone();
    for (s, t) in b.neq.iter() {
        neq.insert(s.clone(), t.clone());
    }
    let inst = CAtom { atom: a.atom.clone(), neq }.apply(&theta)?;
    Some((inst, theta))
}

/// Exact intersection of the denotations.
pub fn intersect(a: &CAtom, b: &CAtom, ctx: Ctx<'_>) -> SymSet {
    let b = b.rename_apart(&a.var_names());
    match unify(a, &b) {
        Some((inst, _)) => simplify(&inst, ctx),
        None => vec![],
    }
}

enum Lit {
    Eq(Term, Term),
    Neq(Term, Term),
}

/// Exact difference `a \ b` as a union of pieces of `a`.
pub fn subtract(a: &CAtom, b: &CAtom, ctx: Ctx<'_>) -> SymSet {
    let b = b.rename_apart(&a.var_names());
    let Some((inst, theta)) = unify(a, &b) else {
        return vec![a.clone()];
    };
    if simplify(&inst, ctx).is_empty() {
        return vec![a.clone()];
    }
    // inst = a ∧ (V = θ(V) for each logvar of a) ∧ (extra inequalities)
    let mut lits = Vec::new();
    for v in a.arg_vars() {
        let to = theta.apply(&v);
        if to != v {
            lits.push(Lit::Eq(v, to));
        }
    }
    let a_neq = a.neq.substitute(&theta).map(|c| drop_trivial(&c)).unwrap_or_default();
    for (s, t) in inst.neq.iter() {
        if !a_neq.contains(s, t) {
            lits.push(Lit::Neq(s.clone(), t.clone()));
        }
    }
    let mut out = Vec::new();
    let mut prefix = a.clone();
    let mut sigma = Substitution::new();
    let compose = |sigma: &mut Substitution, v: Term, to: Term| {
        let step = Substitution::from_pairs([(v.clone(), to.clone())]);
        for val in sigma.map.values_mut() {
            *val = step.apply(val);
        }
        sigma.insert(v, to);
    };
    for lit in lits {
        match lit {
            Lit::Eq(v, t) => {
                let (v, t) = (sigma.apply(&v), sigma.apply(&t));
                if v == t {
                    continue;
                }
                if !v.is_var() && !t.is_var() {
                    out.extend(simplify(&prefix, ctx));
                    return dedup(out);
                }
                out.extend(simplify(&prefix.with(v.clone(), t.clone()), ctx));
                let (from, to) = if v.is_var() { (v, t) } else { (t, v) };
                match prefix.apply(&Substitution::from_pairs([(from.clone(), to.clone())])) {
                    Some(p) => prefix = p,
                    None => return dedup(out),
                }
                compose(&mut sigma, from, to);
            }
            Lit::Neq(s, t) => {
                let (s, t) = (sigma.apply(&s), sigma.apply(&t));
                if s == t {
                    out.extend(simplify(&prefix, ctx));
                    return dedup(out);
                }
                if !s.is_var() && !t.is_var() {
                    continue;
                }
                let (from, to) = if s.is_var() { (s.clone(), t.clone()) } else { (t.clone(), s.clone()) };
                if let Some(p) = prefix.apply(&Substitution::from_pairs([(from, to)])) {
                    out.extend(simplify(&p, ctx));
                }
                prefix = prefix.with(s, t);
            }
        }
    }
    dedup(out)
}

/// Drop entries that are equal up to logvar renaming.
pub fn dedup(set: SymSet) -> SymSet {
    let mut seen = BTreeSet::new();
    set.into_iter().filter(|c| seen.insert(c.canonical())).collect()
}

/// Union as a list of pairwise disjoint entries: pieces of `b` not already in `a` are appended.
pub fn union(a: &[CAtom], b: &[CAtom], ctx: Ctx<'_>) -> SymSet {
    let mut out: SymSet = a.to_vec();
    for y in b {
        let fresh = subtract_sets(std::slice::from_ref(y), &out, ctx);
        out.extend(fresh);
    }
    dedup(out)
}

pub fn intersect_sets(a: &[CAtom], b: &[CAtom], ctx: Ctx<'_>) -> SymSet {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            out.extend(intersect(x, y, ctx));
        }
    }
    dedup(out)
}

pub fn subtract_sets(a: &[CAtom], b: &[CAtom], ctx: Ctx<'_>) -> SymSet {
    let mut cur: SymSet = a.to_vec();
    for y in b {
        cur = cur.iter().flat_map(|x| subtract(x, y, ctx)).collect();
    }
    dedup(cur)
}

/// Entry-granular intersection: the entries of `a` that overlap some entry of `b`.
pub fn rep_intersect(a: &[CAtom], b: &[CAtom], ctx: Ctx<'_>) -> SymSet {
    a.iter().filter(|x| b.iter().any(|y| !intersect(x, y, ctx).is_empty())).cloned().collect()
}

/// Simplify every entry, drop empty ones and make the entries pairwise disjoint.
pub fn normalize_set(a: &[CAtom], ctx: Ctx<'_>) -> SymSet {
    let pieces: SymSet = a.iter().flat_map(|x| simplify(x, ctx)).collect();
    union(&[], &pieces, ctx)
}

/// Rename representatives to logvars, choosing names clear of existing logvars.
pub(crate) fn reps_to_vars(ca: &CAtom, reps: &[Term], names: &[Term]) -> (CAtom, Vec<Term>) {
    let mut taken = ca.var_names();
    let mut theta = Substitution::new();
    let mut vars = Vec::new();
    for (r, x) in reps.iter().zip(names) {
        let name = if taken.contains(x.name()) { fresh_name(x.name(), &taken) } else { x.name().to_string() };
        taken.insert(name.clone());
        let v = Term::var(name, r.domain());
        theta.insert(r.clone(), v.clone());
        vars.push(v);
    }
    (ca.apply(&theta).expect("fresh logvars"), vars)
}

/// Ground atoms denoted by `ca` once representatives take the objects in `sigma`.
pub fn image(
    ca: &CAtom,
    sigma: &BTreeMap<Term, String>,
    objects: &BTreeMap<String, Vec<String>>,
) -> BTreeSet<crate::model::GroundVar> {
    let vars: Vec<Term> = ca.all_vars().into_iter().collect();
    let mut out = BTreeSet::new();
    let mut vals: Vec<usize> = vec![0; vars.len()];
    let choices: Vec<&Vec<String>> = vars.iter().map(|v| &objects[v.domain()]).collect();
    if choices.iter().any(|c| c.is_empty()) {
        return out;
    }
    let value = |t: &Term, vals: &[usize]| -> String {
        match t {
            Term::Var { .. } => {
                let i = vars.iter().position(|v| v == t).unwrap();
                choices[i][vals[i]].clone()
            }
            Term::Obj { name, .. } => name.clone(),
            Term::Rep { .. } => sigma.get(t).cloned().unwrap_or_else(|| panic!("unbound {t}")),
        }
    };
    loop {
        if ca.neq.iter().all(|(a, b)| value(a, &vals) != value(b, &vals)) {
            out.insert(crate::model::GroundVar {
                pred: ca.atom.pred.clone(),
                args: ca.atom.args.iter().map(|t| value(t, &vals)).collect(),
            });
        }
        let mut i = vars.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < choices[i].len() {
                break;
            }
            vals[i] = 0;
        }
    }
}

pub fn image_set(
    set: &[CAtom],
    sigma: &BTreeMap<Term, String>,
    objects: &BTreeMap<String, Vec<String>>,
) -> BTreeSet<crate::model::GroundVar> {
    set.iter().flat_map(|c| image(c, sigma, objects)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Term;

    fn x() -> Term {
        Term::var("X", "P")
    }
    fn y() -> Term {
        Term::var("Y", "P")
    }
    fn r(name: &str) -> Term {
        Term::rep(name, "P")
    }
    fn f(a: Term, b: Term) -> Atom {
        Atom::new("F", vec![a, b])
    }
    fn uni(n: usize) -> Universe {
        Universe { sizes: [("P".to_string(), n)].into(), constants: BTreeMap::new() }
    }
    fn objects(n: usize) -> BTreeMap<String, Vec<String>> {
        [("P".to_string(), (1..=n).map(|i| format!("p{i}")).collect())].into()
    }

    /// Check `got` against the set-level oracle for every injective placement of the params.
    fn agrees(
        got: &[CAtom],
        expect: impl Fn(&BTreeMap<Term, String>) -> BTreeSet<crate::model::GroundVar>,
        params: &[Term],
        n: usize,
    ) {
        let objs = objects(n);
        for combo in crate::combinat::k_subsets(n, params.len()) {
            for perm in crate::combinat::permutations(params.len()) {
                let sigma: BTreeMap<Term, String> =
                    params.iter().zip(&perm).map(|(p, &j)| (p.clone(), objs["P"][combo[j]].clone())).collect();
                assert_eq!(image_set(got, &sigma, &objs), expect(&sigma), "sigma {sigma:?}");
            }
        }
    }

    #[test]
    fn intersect_with_rep_row() {
        let u = uni(4);
        let params = [r("x_0")];
        let ctx = Ctx { universe: &u, params: &params };
        let a = CAtom::new(f(x(), y()), {
            let mut c = Constraint::new();
            c.insert(x(), y());
            c
        });
        let b = CAtom::plain(f(r("x_0"), y()));
        let got = intersect(&a, &b, ctx);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].atom, f(r("x_0"), y()));
        assert!(got[0].neq.contains(&y(), &r("x_0")));
    }

    #[test]
    fn subtract_matches_images() {
        for n in 1..=4 {
            let u = uni(n);
            let params = [r("a"), r("b")];
            let ctx = Ctx { universe: &u, params: &params };
            let a = CAtom::plain(f(x(), y()));
            let b = CAtom::new(f(r("a"), y()), {
                let mut c = Constraint::new();
                c.insert(y(), r("b"));
                c
            });
            let got = subtract(&a, &b, ctx);
            let objs = objects(n);
            agrees(
                &got,
                |s| {
                    let all = image(&a, s, &objs);
                    let cut = image(&b, s, &objs);
                    all.difference(&cut).cloned().collect()
                },
                &params,
                n,
            );
        }
    }

    #[test]
    fn existential_depends_on_domain_size() {
        // F(X,X') with X' existential: X' != X, X' != a. Needs three free objects when X != a.
        let xp = Term::var("X'", "P");
        let mut c = Constraint::new();
        c.insert(xp.clone(), x());
        c.insert(xp.clone(), r("a"));
        let ca = CAtom::new(Atom::new("S", vec![x()]), c);
        let params = [r("a")];
        for n in 1..=4 {
            let u = uni(n);
            let ctx = Ctx { universe: &u, params: &params };
            let got = simplify(&ca, ctx);
            let objs = objects(n);
            agrees(&got, |s| image(&ca, s, &objs), &params, n);
            assert!(got.iter().all(|g| g.existentials().is_empty()));
        }
    }

    #[test]
    fn disjoint_by_pred_or_constant() {
        let u = uni(3);
        let ctx = Ctx { universe: &u, params: &[] };
        let a = CAtom::plain(Atom::new("S", vec![x()]));
        let b = CAtom::plain(Atom::new("T", vec![x()]));
        assert!(intersect(&a, &b, ctx).is_empty());
        assert_eq!(subtract(&a, &b, ctx), vec![a.clone()]);
        let c1 = CAtom::plain(Atom::new("S", vec![Term::obj("p1", "P")]));
        let c2 = CAtom::plain(Atom::new("S", vec![Term::obj("p2", "P")]));
        assert!(intersect(&c1, &c2, ctx).is_empty());
    }

    #[test]
    fn unsatisfiable_when_domain_too_small() {
        let params = [r("a"), r("b")];
        let u = uni(2);
        let ctx = Ctx { universe: &u, params: &params };
        let mut c = Constraint::new();
        c.insert(x(), r("a"));
        c.insert(x(), r("b"));
        assert!(!satisfiable(&CAtom::new(Atom::new("S", vec![x()]), c.clone()), ctx));
        let u3 = uni(3);
        assert!(satisfiable(&CAtom::new(Atom::new("S", vec![x()]), c), Ctx { universe: &u3, params: &params }));
    }

    #[test]
    fn canonical_ignores_names() {
        let a = CAtom::plain(f(x(), y()));
        let b = CAtom::plain(f(Term::var("U", "P"), Term::var("V", "P")));
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(dedup(vec![a, b]).len(), 1);
    }
}
