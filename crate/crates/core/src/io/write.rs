use std::fmt::Write;

use crate::model::{Atom, Domain, Model};

fn is_numbered(d: &Domain) -> bool {
    *d == Domain::numbered(d.name.clone(), d.size())
}

fn atom(a: &Atom) -> String {
    if a.args.is_empty() {
        a.pred.clone()
    } else {
        let args: Vec<&str> = a.args.iter().map(|t| t.name()).collect();
        format!("{}({})", a.pred, args.join(", "))
    }
}

/// Text form accepted by [`parse_model`](super::parse_model); tables are written
/// with the shortest representation that reads back to the same `f64`.
pub fn write_model(m: &Model) -> String {
    let mut out = String::new();
    for d in &m.domains {
        if is_numbered(d) {
            writeln!(out, "domain {} = {};", d.name, d.size()).unwrap();
        } else {
            writeln!(out, "domain {} = {{{}}};", d.name, d.objects.join(", ")).unwrap();
        }
    }
    for p in &m.preds {
        out.push_str("pred ");
        out.push_str(&p.name);
        if !p.args.is_empty() {
            write!(out, "({})", p.args.join(", ")).unwrap();
        }
        if p.range != ["true", "false"] {
            write!(out, " : {{{}}}", p.range.join(", ")).unwrap();
        }
        out.push_str(";\n");
    }
    for pf in &m.parfactors {
        let atoms: Vec<String> = pf.atoms.iter().map(atom).collect();
        write!(out, "parfactor {}", atoms.join(", ")).unwrap();
        if !pf.constraint.is_empty() {
            let neq: Vec<String> = pf.constraint.iter().map(|(a, b)| format!("{} != {}", a.name(), b.name())).collect();
            write!(out, " | {}", neq.join(", ")).unwrap();
        }
        let table: Vec<String> = pf.table.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, " with table [{}];", table.join(", ")).unwrap();
    }
    out
}
