use std::fmt;

use super::AtomSet;

/// Abstract syntax of an LTLf formula. Atoms index into an [`AtomSet`].
///
/// `And` and `Or` are n-ary with at least two children; the derived
/// `Ord` is what canonical forms sort children by.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Last,
    Atom(usize),
    Not(Box<Formula>),
    Next(Box<Formula>),
    WeakNext(Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(i: usize) -> Self {
        Atom(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        And(vec![a, b])
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Or(vec![a, b])
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Iff(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Next(Box::new(f))
    }

    pub fn weak_next(f: Formula) -> Self {
        WeakNext(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Always(Box::new(f))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            True | False | Last | Atom(_) => vec![],
            Not(f) | Next(f) | WeakNext(f) | Eventually(f) | Always(f) => vec![f],
            Until(a, b) | Implies(a, b) | Iff(a, b) => vec![a, b],
            And(fs) | Or(fs) => fs.iter().collect(),
        }
    }

    /// Largest atom index mentioned, if any.
    pub fn max_atom(&self) -> Option<usize> {
        match self {
            Atom(i) => Some(*i),
            _ => self.children().into_iter().filter_map(Formula::max_atom).max(),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::depth)
            .max()
            .unwrap_or(0)
    }

    /// True when the formula has no temporal operators.
    pub fn is_propositional(&self) -> bool {
        match self {
            Last | Next(_) | WeakNext(_) | Eventually(_) | Always(_) | Until(..) => false,
            _ => self.children().into_iter().all(Formula::is_propositional),
        }
    }

    /// True when only `Atom/True/False/Last/Not/And/Or/Next/Until` occur.
    pub fn is_core(&self) -> bool {
        match self {
            WeakNext(_) | Eventually(_) | Always(_) | Implies(..) | Iff(..) => false,
            _ => self.children().into_iter().all(Formula::is_core),
        }
    }

    /// Rewrites derived operators into the core fragment.
    ///
    /// `F φ ≡ true U φ`, `G φ ≡ !F !φ`, `N φ ≡ last | X φ`,
    /// `a -> b ≡ !a | b`, `a <-> b ≡ (a & b) | (!a & !b)`.
    pub fn expand_derived(&self) -> Formula {
        match self {
            True | False | Last | Atom(_) => self.clone(),
            Not(f) => Formula::not(f.expand_derived()),
            Next(f) => Formula::next(f.expand_derived()),
            Until(a, b) => Formula::until(a.expand_derived(), b.expand_derived()),
            And(fs) => And(fs.iter().map(Formula::expand_derived).collect()),
            Or(fs) => Or(fs.iter().map(Formula::expand_derived).collect()),
            Eventually(f) => Formula::until(True, f.expand_derived()),
            Always(f) => Formula::not(Formula::until(True, Formula::not(f.expand_derived()))),
            WeakNext(f) => Formula::or(Last, Formula::next(f.expand_derived())),
            Implies(a, b) => Formula::or(Formula::not(a.expand_derived()), b.expand_derived()),
            Iff(a, b) => {
                let (a, b) = (a.expand_derived(), b.expand_derived());
                Formula::or(
                    Formula::and(a.clone(), b.clone()),
                    Formula::and(Formula::not(a), Formula::not(b)),
                )
            }
        }
    }

    /// Fully parenthesized rendering; every compound node is wrapped.
    pub fn canonical<'a>(&'a self, atoms: &'a AtomSet) -> Canonical<'a> {
        Canonical { f: self, atoms }
    }

    /// Minimal-parenthesis rendering in the given operator style.
    pub fn display<'a>(&'a self, atoms: &'a AtomSet, style: Style) -> Compact<'a> {
        Compact {
            f: self,
            atoms,
            style,
        }
    }
}

/// Operator spellings for [`Formula::display`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// `! & | -> <->`, the formula file syntax.
    Ascii,
    /// `~ ^ | => <=>`, RDDL boolean syntax.
    Rddl,
}

impl Style {
    fn not(self) -> &'static str {
        match self {
            Style::Ascii => "!",
            Style::Rddl => "~",
        }
    }
    fn and(self) -> &'static str {
        match self {
            Style::Ascii => " & ",
            Style::Rddl => " ^ ",
        }
    }
    fn implies(self) -> &'static str {
        match self {
            Style::Ascii => " -> ",
            Style::Rddl => " => ",
        }
    }
    fn iff(self) -> &'static str {
        match self {
            Style::Ascii => " <-> ",
            Style::Rddl => " <=> ",
        }
    }
}

pub struct Canonical<'a> {
    f: &'a Formula,
    atoms: &'a AtomSet,
}

impl fmt::Display for Canonical<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms = self.atoms;
        fn c<'b>(f: &'b Formula, atoms: &'b AtomSet) -> Canonical<'b> {
            Canonical { f, atoms }
        }
        match self.f {
            True => write!(out, "true"),
            False => write!(out, "false"),
            Last => write!(out, "last"),
            Atom(i) => write!(out, "{}", atoms.name(*i)),
            Not(f) => write!(out, "(!{})", c(f, atoms)),
            Next(f) => write!(out, "(X {})", c(f, atoms)),
            WeakNext(f) => write!(out, "(N {})", c(f, atoms)),
            Eventually(f) => write!(out, "(F {})", c(f, atoms)),
            Always(f) => write!(out, "(G {})", c(f, atoms)),
            Until(a, b) => write!(out, "({} U {})", c(a, atoms), c(b, atoms)),
            Implies(a, b) => write!(out, "({} -> {})", c(a, atoms), c(b, atoms)),
            Iff(a, b) => write!(out, "({} <-> {})", c(a, atoms), c(b, atoms)),
            And(fs) | Or(fs) => {
                let sep = if matches!(self.f, And(_)) { " & " } else { " | " };
                write!(out, "(")?;
                for (i, f) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(out, "{sep}")?;
                    }
                    write!(out, "{}", c(f, atoms))?;
                }
                write!(out, ")")
            }
        }
    }
}

pub struct Compact<'a> {
    f: &'a Formula,
    atoms: &'a AtomSet,
    style: Style,
}

// Binding strength, loosest first. Matches the parser's grammar levels.
const P_IFF: u8 = 1;
const P_IMPLIES: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_UNTIL: u8 = 5;
const P_UNARY: u8 = 6;
const P_ATOM: u8 = 7;

fn precedence(f: &Formula) -> u8 {
    match f {
        Iff(..) => P_IFF,
        Implies(..) => P_IMPLIES,
        Or(_) => P_OR,
        And(_) => P_AND,
        Until(..) => P_UNTIL,
        Not(_) | Next(_) | WeakNext(_) | Eventually(_) | Always(_) => P_UNARY,
        True | False | Last | Atom(_) => P_ATOM,
    }
}

impl Compact<'_> {
    fn write(&self, f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = precedence(f) < min;
        if paren {
            write!(out, "(")?;
        }
        let s = self.style;
        match f {
            True => write!(out, "true")?,
            False => write!(out, "false")?,
            Last => write!(out, "last")?,
            Atom(i) => write!(out, "{}", self.atoms.name(*i))?,
            Not(g) => {
                write!(out, "{}", s.not())?;
                self.write(g, P_UNARY, out)?;
            }
            Next(g) | WeakNext(g) | Eventually(g) | Always(g) => {
                let op = match f {
                    Next(_) => "X ",
                    WeakNext(_) => "N ",
                    Eventually(_) => "F ",
                    _ => "G ",
                };
                write!(out, "{op}")?;
                self.write(g, P_UNARY, out)?;
            }
            Until(a, b) => {
                self.write(a, P_UNTIL + 1, out)?;
                write!(out, " U ")?;
                self.write(b, P_UNTIL, out)?;
            }
            Implies(a, b) => {
                self.write(a, P_IMPLIES + 1, out)?;
                write!(out, "{}", s.implies())?;
                self.write(b, P_IMPLIES, out)?;
            }
            Iff(a, b) => {
                self.write(a, P_IFF, out)?;
                write!(out, "{}", s.iff())?;
                self.write(b, P_IFF + 1, out)?;
            }
            And(fs) | Or(fs) => {
                let (sep, p) = if matches!(f, And(_)) {
                    (s.and(), P_AND)
                } else {
                    (" | ", P_OR)
                };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(out, "{sep}")?;
                    }
                    self.write(g, p + 1, out)?;
                }
            }
        }
        if paren {
            write!(out, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Compact<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.f, 0, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms() -> AtomSet {
        AtomSet::new(["g", "r"]).unwrap()
    }

    #[test]
    fn expand_eventually_and_weak_next() {
        let g = Formula::atom(0);
        assert_eq!(
            Formula::eventually(g.clone()).expand_derived(),
            Formula::until(True, g.clone())
        );
        assert_eq!(
            Formula::weak_next(g.clone()).expand_derived(),
            Formula::or(Last, Formula::next(g.clone()))
        );
        assert_eq!(g.expand_derived(), g);
        assert!(Formula::always(Formula::implies(g.clone(), Formula::atom(1)))
            .expand_derived()
            .is_core());
    }

    #[test]
    fn renderings() {
        let a = atoms();
        let f = Formula::until(
            Formula::and(Formula::not(Formula::atom(1)), Formula::not(Formula::atom(0))),
            Formula::atom(0),
        );
        assert_eq!(f.canonical(&a).to_string(), "(((!r) & (!g)) U g)");
        assert_eq!(f.display(&a, Style::Ascii).to_string(), "(!r & !g) U g");
        assert_eq!(f.display(&a, Style::Rddl).to_string(), "(~r ^ ~g) U g");
    }
}
