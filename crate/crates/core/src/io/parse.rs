use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Atom, Constraint, Domain, Model, Parfactor, PredDecl, Term};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, column: c0 });
            continue;
        }
        if c.is_ascii_digit()
            || c == '.'
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit() || *d == '.'))
        {
            let start = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                let exp_sign = (d == '+' || d == '-') && matches!(chars[i - 1], 'e' | 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let v: f64 = text.parse().map_err(|_| syntax(l0, c0, format!("bad number '{text}'")))?;
            out.push(Spanned { tok: Tok::Num(v), line: l0, column: c0 });
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let sym = if two == "!=" {
            "!="
        } else {
            match c {
                '(' => "(",
                ')' => ")",
                '{' => "{",
                '}' => "}",
                '[' => "[",
                ']' => "]",
                ',' => ",",
                ';' => ";",
                ':' => ":",
                '=' => "=",
                '|' => "|",
                _ => return Err(syntax(l0, c0, format!("unexpected character '{c}'"))),
            }
        };
        i += sym.len();
        col += sym.len();
        out.push(Spanned { tok: Tok::Sym(sym), line: l0, column: c0 });
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    model: Model,
}

/// Identifier with its line and column.
type Name = (String, usize, usize);

/// Raw atom as written: predicate name, argument identifiers and their positions.
struct RawAtom {
    pred: String,
    args: Vec<Name>,
    line: usize,
    column: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> Error {
        let t = self.peek();
        syntax(t.line, t.column, msg)
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek().tok, Tok::Sym(s) if s == sym) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.err_here(format!("expected '{sym}'")))
        }
    }

    fn ident(&mut self) -> Result<Name> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.column)),
            _ => Err(syntax(t.line, t.column, "expected identifier")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            _ => Err(syntax(t.line, t.column, format!("expected '{kw}'"))),
        }
    }

    fn statement(&mut self) -> Result<()> {
        let (kw, line, column) = self.ident()?;
        match kw.as_str() {
            "domain" => self.domain(),
            "pred" => self.pred(),
            "parfactor" => self.parfactor(),
            other => Err(syntax(line, column, format!("unknown statement '{other}'"))),
        }?;
        self.eat(";");
        Ok(())
    }

    fn domain(&mut self) -> Result<()> {
        let (name, line, column) = self.ident()?;
        if self.model.domain(&name).is_some() {
            return Err(syntax(line, column, format!("domain {name} declared twice")));
        }
        self.expect("=")?;
        let t = self.next();
        let domain = match t.tok {
            Tok::Num(n) if n >= 0.0 && n.fract() == 0.0 => Domain::numbered(name, n as usize),
            Tok::Sym("{") => {
                let mut objects = Vec::new();
                if !self.eat("}") {
                    loop {
                        objects.push(self.ident()?.0);
                        if self.eat("}") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Domain::new(name, objects)
            }
            _ => return Err(syntax(t.line, t.column, "expected a size or an object list")),
        };
        self.model.domains.push(domain);
        Ok(())
    }

    fn pred(&mut self) -> Result<()> {
        let (name, line, column) = self.ident()?;
        if self.model.pred(&name).is_some() {
            return Err(syntax(line, column, format!("predicate {name} declared twice")));
        }
        let mut args = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                let (d, l, c) = self.ident()?;
                if self.model.domain(&d).is_none() {
                    return Err(syntax(l, c, format!("unknown domain {d}")));
                }
                args.push(d);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let mut decl = PredDecl::boolean(name, args);
        if self.eat(":") {
            self.expect("{")?;
            let mut range = Vec::new();
            loop {
                range.push(self.ident()?.0);
                if self.eat("}") {
                    break;
                }
                self.expect(",")?;
            }
            decl.range = range;
        }
        self.model.preds.push(decl);
        Ok(())
    }

    fn raw_atom(&mut self) -> Result<RawAtom> {
        let (pred, line, column) = self.ident()?;
        let mut args = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                args.push(self.ident()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(RawAtom { pred, args, line, column })
    }

    fn parfactor(&mut self) -> Result<()> {
        let mut raws = vec![self.raw_atom()?];
        while self.eat(",") {
            raws.push(self.raw_atom()?);
        }
        let mut neqs = Vec::new();
        if self.eat("|") {
            loop {
                let a = self.ident()?;
                self.expect("!=")?;
                let b = self.ident()?;
                neqs.push((a, b));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.keyword("with")?;
        self.keyword("table")?;
        self.expect("[")?;
        let mut table = Vec::new();
        if !self.eat("]") {
            loop {
                let t = self.next();
                match t.tok {
                    Tok::Num(v) => table.push(v),
                    _ => return Err(syntax(t.line, t.column, "expected a number")),
                }
                if self.eat("]") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let pf = self.resolve(raws, neqs, table)?;
        self.model.parfactors.push(pf);
        Ok(())
    }

    /// Identifiers are objects when declared in the argument's domain, logvars otherwise.
    fn resolve(&self, raws: Vec<RawAtom>, neqs: Vec<(Name, Name)>, table: Vec<f64>) -> Result<Parfactor> {
        let mut logvars: BTreeMap<String, String> = BTreeMap::new();
        let mut atoms = Vec::new();
        for raw in raws {
            let decl = self
                .model
                .pred(&raw.pred)
                .ok_or_else(|| syntax(raw.line, raw.column, format!("unknown predicate {}", raw.pred)))?;
            if decl.args.len() != raw.args.len() {
                return Err(syntax(
                    raw.line,
                    raw.column,
                    format!("{} expects {} arguments, got {}", raw.pred, decl.args.len(), raw.args.len()),
                ));
            }
            let mut args = Vec::new();
            for ((name, l, c), dom) in raw.args.into_iter().zip(&decl.args) {
                let is_obj = self.model.domain(dom).is_some_and(|d| d.objects.contains(&name));
                if is_obj {
                    args.push(Term::obj(name, dom.clone()));
                    continue;
                }
                match logvars.get(&name) {
                    Some(d) if d != dom => {
                        return Err(syntax(l, c, format!("logvar {name} used with domains {d} and {dom}")));
                    }
                    _ => {
                        logvars.insert(name.clone(), dom.clone());
                    }
                }
                args.push(Term::var(name, dom.clone()));
            }
            atoms.push(Atom::new(raw.pred, args));
        }
        let mut constraint = Constraint::new();
        for ((a, la, ca), (b, lb, cb)) in neqs {
            let ta = logvars.get(&a).map(|d| Term::var(a.clone(), d.clone()));
            let tb = logvars.get(&b).map(|d| Term::var(b.clone(), d.clone()));
            let (ta, tb) = match (ta, tb) {
                (Some(x), Some(y)) => (x, y),
                (Some(x), None) => {
                    let y = self.object_in(&b, x.domain(), lb, cb)?;
                    (x, y)
                }
                (None, Some(y)) => {
                    let x = self.object_in(&a, y.domain(), la, ca)?;
                    (x, y)
                }
                (None, None) => {
                    return Err(syntax(la, ca, format!("constraint {a} != {b} mentions no logvar of the parfactor")))
                }
            };
            if ta.domain() != tb.domain() {
                return Err(syntax(la, ca, format!("{a} and {b} belong to different domains")));
            }
            if ta == tb {
                return Err(syntax(la, ca, format!("constraint {a} != {a} is unsatisfiable")));
            }
            constraint.insert(ta, tb);
        }
        Ok(Parfactor { atoms, constraint, table })
    }

    fn object_in(&self, name: &str, domain: &str, line: usize, column: usize) -> Result<Term> {
        if self.model.domain(domain).is_some_and(|d| d.objects.iter().any(|o| o == name)) {
            Ok(Term::obj(name, domain))
        } else {
            Err(syntax(line, column, format!("{name} is neither a logvar of the parfactor nor an object of {domain}")))
        }
    }
}

/// Parse a model and run the structural checks.
pub fn parse_model(src: &str) -> Result<Model> {
    let mut p = Parser { toks: lex(src)?, pos: 0, model: Model::default() };
    while p.peek().tok != Tok::Eof {
        p.statement()?;
    }
    p.model.check()?;
    Ok(p.model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn friends() {
        let m = parse_model(
            "domain P = 3;\npred F(P,P)\n# symmetric\nparfactor F(X,Y), F(Y,X) | X != Y with table [1, 2.5, 2.5, 1e1];",
        )
        .unwrap();
        assert_eq!(m.domains[0].objects, vec!["p1", "p2", "p3"]);
        let pf = &m.parfactors[0];
        assert_eq!(pf.table, vec![1.0, 2.5, 2.5, 10.0]);
        assert!(pf.constraint.contains(&Term::var("X", "P"), &Term::var("Y", "P")));
    }

    #[test]
    fn constants_and_ranges() {
        let m = parse_model("domain P = {ann, bob}\npred C(P) : {r, g, b}\nparfactor C(ann), C(X) | X != ann with table [1,1,1,1,1,1,1,1,1]").unwrap();
        let pf = &m.parfactors[0];
        assert_eq!(pf.atoms[0].args[0], Term::obj("ann", "P"));
        assert_eq!(m.range_size("C"), 3);
    }

    #[test]
    fn errors_carry_position() {
        match parse_model("domain P = 3;\npred F(P,P);\nparfactor F(X) with table [1,1]") {
            Err(Error::Syntax { line: 3, column: 11, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_model("domain P = 3;\n  pred F(Q)") {
            Err(Error::Syntax { line: 2, column: 10, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_model("domain P = 3; @"), Err(Error::Syntax { line: 1, column: 15, .. })));
    }

    #[test]
    fn table_size_is_checked() {
        assert!(parse_model("domain P = 2; pred S(P); parfactor S(X) with table [1,2,3]").is_err());
    }
}
