//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! iff     := implies ("<->" implies)*
//! implies := or ("->" implies)?
//! or      := and ("|" and)*
//! and     := until ("&" until)*
//! until   := unary ("U" until)?
//! unary   := ("!" | "X" | "N" | "F" | "G") unary | primary
//! primary := ident | "true" | "false" | "last" | "(" iff ")"
//! ```
//!
//! RDDL spellings `~`, `^`, `=>` and `<=>` are accepted as aliases.

use super::{is_valid_name, AtomSet, Formula, LtlfError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Next,
    WeakNext,
    Until,
    Eventually,
    Always,
    True,
    False,
    Last,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LtlfError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'!' | b'~' => {
                i += 1;
                Tok::Not
            }
            b'&' | b'^' => {
                i += 1;
                Tok::And
            }
            b'|' => {
                i += 1;
                Tok::Or
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'-' | b'=' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Implies
            }
            b'<' if matches!(
                (bytes.get(i + 1), bytes.get(i + 2), bytes.get(i + 3)),
                (Some(b'-'), Some(b'>'), _) | (Some(b'='), Some(b'>'), _)
            ) =>
            {
                i += 3;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                match &text[start..i] {
                    "X" => Tok::Next,
                    "N" => Tok::WeakNext,
                    "U" => Tok::Until,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "last" => Tok::Last,
                    word => Tok::Ident(word.to_string()),
                }
            }
            _ => {
                return Err(LtlfError::Syntax {
                    offset: start,
                    message: format!("unexpected character '{}'", text[start..].chars().next().unwrap()),
                })
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    atoms: Option<&'a AtomSet>,
    seen: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> LtlfError {
        let found = match self.peek() {
            Some(t) => describe(t),
            None => "end of input".to_string(),
        };
        LtlfError::Syntax {
            offset: self.offset(),
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn iff(&mut self) -> Result<Formula, LtlfError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, LtlfError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LtlfError> {
        let first = self.and()?;
        let mut items = vec![first];
        while self.eat(&Tok::Or) {
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        })
    }

    fn and(&mut self) -> Result<Formula, LtlfError> {
        let first = self.until()?;
        let mut items = vec![first];
        while self.eat(&Tok::And) {
            items.push(self.until()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        })
    }

    fn until(&mut self) -> Result<Formula, LtlfError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LtlfError> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::not,
            Some(Tok::Next) => Formula::next,
            Some(Tok::WeakNext) => Formula::weak_next,
            Some(Tok::Eventually) => Formula::eventually,
            Some(Tok::Always) => Formula::always,
            _ => return self.primary(),
        };
        self.pos += 1;
        Ok(wrap(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, LtlfError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.error("a formula")),
        };
        let f = match tok {
            Tok::True => Formula::True,
            Tok::False => Formula::False,
            Tok::Last => Formula::Last,
            Tok::Ident(name) => self.resolve(&name)?,
            Tok::LParen => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("')'"));
                }
                return Ok(inner);
            }
            _ => return Err(self.error("a formula")),
        };
        self.pos += 1;
        Ok(f)
    }

    fn resolve(&mut self, name: &str) -> Result<Formula, LtlfError> {
        match self.atoms {
            Some(atoms) => atoms
                .index_of(name)
                .map(Formula::Atom)
                .ok_or_else(|| LtlfError::UnknownProposition(name.to_string())),
            None => {
                if !is_valid_name(name) {
                    return Err(LtlfError::InvalidProposition(name.to_string()));
                }
                let i = match self.seen.iter().position(|s| s == name) {
                    Some(i) => i,
                    None => {
                        self.seen.push(name.to_string());
                        self.seen.len() - 1
                    }
                };
                // provisional index, remapped once the full atom set is known
                Ok(Formula::Atom(i))
            }
        }
    }
}

fn run(text: &str, atoms: Option<&AtomSet>) -> Result<(Formula, Vec<String>), LtlfError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        atoms,
        seen: Vec::new(),
    };
    let f = p.iff()?;
    if p.pos != p.toks.len() {
        return Err(p.error("end of input"));
    }
    Ok((f, p.seen))
}

/// Parses `text` against a declared atom set.
pub fn parse(text: &str, atoms: &AtomSet) -> Result<Formula, LtlfError> {
    run(text, Some(atoms)).map(|(f, _)| f)
}

/// Parses `text`, declaring every identifier it mentions as an atom.
pub fn parse_inferring_atoms(text: &str) -> Result<(Formula, AtomSet), LtlfError> {
    let (f, seen) = run(text, None)?;
    let atoms = AtomSet::new(seen.iter().cloned())?;
    let map: Vec<usize> = seen
        .iter()
        .map(|n| atoms.index_of(n).expect("declared above"))
        .collect();
    Ok((remap(&f, &map), atoms))
}

fn remap(f: &Formula, map: &[usize]) -> Formula {
    use Formula::*;
    let b = |g: &Formula| Box::new(remap(g, map));
    match f {
        Atom(i) => Atom(map[*i]),
        True | False | Last => f.clone(),
        Not(g) => Not(b(g)),
        Next(g) => Next(b(g)),
        WeakNext(g) => WeakNext(b(g)),
        Eventually(g) => Eventually(b(g)),
        Always(g) => Always(b(g)),
        Until(x, y) => Until(b(x), b(y)),
        Implies(x, y) => Implies(b(x), b(y)),
        Iff(x, y) => Iff(b(x), b(y)),
        And(gs) => And(gs.iter().map(|g| remap(g, map)).collect()),
        Or(gs) => Or(gs.iter().map(|g| remap(g, map)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::Style;
    use Formula as Fm;

    fn rg() -> AtomSet {
        AtomSet::new(["r", "g"]).unwrap()
    }

    #[test]
    fn until_of_conjunctions() {
        let a = rg();
        let (r, g) = (Fm::atom(a.index_of("r").unwrap()), Fm::atom(a.index_of("g").unwrap()));
        let f = parse("(!r & !g) U (g & !r)", &a).unwrap();
        assert_eq!(
            f,
            Fm::until(
                Fm::and(Fm::not(r.clone()), Fm::not(g.clone())),
                Fm::and(g, Fm::not(r))
            )
        );
    }

    #[test]
    fn eventually_chain() {
        let a = AtomSet::new(["g1", "g2"]).unwrap();
        let f = parse("F (g1 & X F g2)", &a).unwrap();
        assert_eq!(
            f,
            Fm::eventually(Fm::and(
                Fm::atom(0),
                Fm::next(Fm::eventually(Fm::atom(1)))
            ))
        );
    }

    #[test]
    fn incomplete_until_reports_offset() {
        match parse("r U", &rg()) {
            Err(LtlfError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_proposition() {
        assert_eq!(
            parse("r & b", &rg()),
            Err(LtlfError::UnknownProposition("b".into()))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let a = rg();
        let r = Fm::atom(1);
        let g = Fm::atom(0);
        // Until is right-associative
        assert_eq!(
            parse("r U g U r", &a).unwrap(),
            Fm::until(r.clone(), Fm::until(g.clone(), r.clone()))
        );
        // unary binds tighter than Until, Until tighter than &
        assert_eq!(
            parse("!r U g & r", &a).unwrap(),
            Fm::and(Fm::until(Fm::not(r.clone()), g.clone()), r.clone())
        );
        assert_eq!(
            parse("r | g & r -> g <-> r", &a).unwrap(),
            Fm::iff(
                Fm::implies(Fm::or(r.clone(), Fm::and(g.clone(), r.clone())), g.clone()),
                r.clone()
            )
        );
    }

    #[test]
    fn rddl_aliases() {
        let a = rg();
        assert_eq!(
            parse("~r ^ ~g", &a).unwrap(),
            parse("!r & !g", &a).unwrap()
        );
    }

    #[test]
    fn inferred_atoms_are_sorted() {
        let (f, atoms) = parse_inferring_atoms("r U g").unwrap();
        assert_eq!(atoms.names(), &["g", "r"]);
        assert_eq!(f, Fm::until(Fm::atom(1), Fm::atom(0)));
        assert_eq!(f.display(&atoms, Style::Ascii).to_string(), "r U g");
    }
}
