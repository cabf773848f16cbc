//! Deterministic finite automata over `2^AP` with symbolic edge guards.

mod compile;
mod export;
mod guard;
mod minimize;

pub use compile::{compile, compile_with, CompileOptions, DEFAULT_MAX_STATES};
pub use export::{parse_rddl_transitions, DfaJson, EdgeJson};
pub use guard::{eval_propositional, synthesize};
pub use minimize::minimize;

use std::collections::VecDeque;

use thiserror::Error;

use crate::ltlf::{AtomSet, Formula, Style, Trace, TraceState};

/// Largest alphabet the dense transition table supports.
pub const MAX_DFA_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("automaton exceeded {0} states during construction")]
    ClosureOverflow(usize),
    #[error("formula has no satisfying trace")]
    UnsatisfiableTask,
    #[error("alphabet of {0} propositions exceeds the supported {MAX_DFA_ATOMS}")]
    TooManyAtoms(usize),
    #[error("formula mentions atom index {0} outside its atom set")]
    AtomOutOfRange(usize),
    #[error("state {state} has {count} enabled edges on valuation {valuation}")]
    NotDeterministic {
        state: usize,
        valuation: String,
        count: usize,
    },
    #[error("malformed automaton: {0}")]
    Malformed(String),
}

/// A propositional edge label; denotes the valuations that satisfy it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Guard(Formula);

impl Guard {
    pub fn new(expr: Formula) -> Result<Self, DfaError> {
        if !expr.is_propositional() {
            return Err(DfaError::Malformed("guard contains temporal operators".into()));
        }
        Ok(Guard(expr))
    }

    pub fn expr(&self) -> &Formula {
        &self.0
    }

    pub fn satisfied_by(&self, s: TraceState) -> bool {
        eval_propositional(&self.0, s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub guard: Guard,
    pub to: usize,
}

/// Complete deterministic automaton. States are `0..num_states()`, printed
/// as `q1..qn`. The dense table maps `(state, valuation)` to the successor.
#[derive(Debug, Clone, PartialEq)]
pub struct Dfa {
    atoms: AtomSet,
    initial: usize,
    accepting: Vec<bool>,
    errors: Vec<bool>,
    table: Vec<usize>,
    edges: Vec<Edge>,
}

impl Dfa {
    /// Builds an automaton from a dense table of `num_states × 2^|AP|`
    /// successors, deriving error states and merged edge guards.
    pub fn from_table(
        atoms: AtomSet,
        initial: usize,
        accepting: Vec<bool>,
        table: Vec<usize>,
    ) -> Result<Self, DfaError> {
        if atoms.len() > MAX_DFA_ATOMS {
            return Err(DfaError::TooManyAtoms(atoms.len()));
        }
        let n = accepting.len();
        let letters = atoms.valuation_count();
        if table.len() != n * letters {
            return Err(DfaError::Malformed(format!(
                "table has {} entries, expected {}",
                table.len(),
                n * letters
            )));
        }
        if initial >= n || table.iter().any(|&t| t >= n) {
            return Err(DfaError::Malformed("state index out of range".into()));
        }
        let errors = error_states_of(&accepting, &table, letters);
        let mut edges = Vec::new();
        for from in 0..n {
            let row = &table[from * letters..(from + 1) * letters];
            let mut targets: Vec<usize> = row.to_vec();
            targets.sort_unstable();
            targets.dedup();
            for to in targets {
                let on: Vec<bool> = row.iter().map(|&t| t == to).collect();
                let guard = Guard(synthesize(atoms.len(), &on));
                edges.push(Edge { from, guard, to });
            }
        }
        Ok(Dfa {
            atoms,
            initial,
            accepting,
            errors,
            table,
            edges,
        })
    }

    /// Builds an automaton from guarded edges, checking that exactly one
    /// edge is enabled for every state and valuation.
    pub fn from_edges(
        atoms: AtomSet,
        num_states: usize,
        initial: usize,
        accepting: Vec<bool>,
        edges: &[(usize, Formula, usize)],
    ) -> Result<Self, DfaError> {
        if atoms.len() > MAX_DFA_ATOMS {
            return Err(DfaError::TooManyAtoms(atoms.len()));
        }
        if accepting.len() != num_states {
            return Err(DfaError::Malformed("accepting mask length".into()));
        }
        let letters = atoms.valuation_count();
        let mut table = vec![usize::MAX; num_states * letters];
        let mut counts = vec![0usize; num_states * letters];
        for (from, guard, to) in edges {
            if *from >= num_states || *to >= num_states {
                return Err(DfaError::Malformed("edge endpoint out of range".into()));
            }
            if !guard.is_propositional() {
                return Err(DfaError::Malformed("guard contains temporal operators".into()));
            }
            for v in atoms.valuations() {
                if eval_propositional(guard, v) {
                    let k = from * letters + v.index();
                    table[k] = *to;
                    counts[k] += 1;
                }
            }
        }
        for (k, &c) in counts.iter().enumerate() {
            if c != 1 {
                return Err(DfaError::NotDeterministic {
                    state: k / letters,
                    valuation: atoms.describe(TraceState((k % letters) as u32)),
                    count: c,
                });
            }
        }
        Dfa::from_table(atoms, initial, accepting, table)
    }

    pub fn atoms(&self) -> &AtomSet {
        &self.atoms
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn is_error(&self, q: usize) -> bool {
        self.errors[q]
    }

    /// Accepting or error: an episode in this state is over.
    pub fn is_terminal(&self, q: usize) -> bool {
        self.accepting[q] || self.errors[q]
    }

    pub fn accepting_mask(&self) -> &[bool] {
        &self.accepting
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.accepting[q]).collect()
    }

    pub fn error_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.errors[q]).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Successor row of `q`, indexed by valuation bits.
    pub fn row(&self, q: usize) -> &[usize] {
        let letters = self.atoms.valuation_count();
        &self.table[q * letters..(q + 1) * letters]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn step(&self, q: usize, s: TraceState) -> usize {
        self.table[q * self.atoms.valuation_count() + s.index()]
    }

    /// Runs the trace from the initial state; accepted iff the last state
    /// reached is accepting.
    pub fn accepts(&self, trace: &Trace) -> bool {
        let q = self.run(trace.states());
        self.accepting[q]
    }

    pub fn run(&self, letters: &[TraceState]) -> usize {
        letters.iter().fold(self.initial, |q, &s| self.step(q, s))
    }

    /// Distinct successors of `q` other than `q` itself, ascending.
    pub fn successors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.row(q).iter().copied().filter(|&t| t != q).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn state_name(q: usize) -> String {
        format!("q{}", q + 1)
    }

    pub fn guard_text(&self, g: &Guard, style: Style) -> String {
        g.expr().display(&self.atoms, style).to_string()
    }
}

/// States from which no accepting state is reachable, found by backward
/// reachability from the accepting set.
pub fn find_error_states(d: &Dfa) -> Vec<usize> {
    let mask = error_states_of(&d.accepting, &d.table, d.atoms.valuation_count());
    (0..mask.len()).filter(|&q| mask[q]).collect()
}

fn error_states_of(accepting: &[bool], table: &[usize], letters: usize) -> Vec<bool> {
    let n = accepting.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in 0..n {
        for &t in &table[q * letters..(q + 1) * letters] {
            preds[t].push(q);
        }
    }
    let mut alive = accepting.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&q| accepting[q]).collect();
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q] {
            if !alive[p] {
                alive[p] = true;
                queue.push_back(p);
            }
        }
    }
    alive.into_iter().map(|a| !a).collect()
}
