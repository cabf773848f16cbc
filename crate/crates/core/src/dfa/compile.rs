use std::collections::{HashMap, VecDeque};

use super::minimize::RawDfa;
use super::{Dfa, DfaError, MAX_DFA_ATOMS};
use crate::ltlf::{accepts_empty_continuation, normalize, progress, to_dnf, AtomSet, Formula};

pub const DEFAULT_MAX_STATES: usize = 4096;

/// Residuals whose normal form would exceed this many clauses keep their
/// simplified shape instead.
const DNF_CLAUSE_CAP: usize = 256;

#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    /// Cap on closure states before minimization.
    pub max_states: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

pub fn compile(f: &Formula, atoms: &AtomSet) -> Result<Dfa, DfaError> {
    compile_with(f, atoms, CompileOptions::default())
}

/// Compiles a formula into its minimal complete automaton.
///
/// Closure states are pairs `(residual, ended_ok)`: the residual is the
/// progressed obligation on the rest of the trace, and `ended_ok` records
/// whether the prefix read so far already satisfies the formula if the
/// trace stops there. The initial pair is `(f, false)` since traces are
/// non-empty. Acceptance is exactly `ended_ok`. Residuals are keyed by
/// their disjunctive normal form.
pub fn compile_with(f: &Formula, atoms: &AtomSet, opts: CompileOptions) -> Result<Dfa, DfaError> {
    if atoms.len() > MAX_DFA_ATOMS {
        return Err(DfaError::TooManyAtoms(atoms.len()));
    }
    if let Some(i) = f.max_atom().filter(|&i| i >= atoms.len()) {
        return Err(DfaError::AtomOutOfRange(i));
    }
    let root = normalize(&f.expand_derived());
    let letters = atoms.valuation_count();

    let mut index: HashMap<(Formula, bool), usize> = HashMap::new();
    let mut states: Vec<(Formula, bool)> = Vec::new();
    let mut table: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();

    let start = (root, false);
    index.insert(start.clone(), 0);
    states.push(start);
    queue.push_back(0usize);

    while let Some(q) = queue.pop_front() {
        let residual = states[q].0.clone();
        let mut row = Vec::with_capacity(letters);
        for s in atoms.valuations() {
            let next = progress(&residual, s);
            let next = to_dnf(&next, DNF_CLAUSE_CAP).unwrap_or(next);
            let key = (next, accepts_empty_continuation(&residual, s));
            let t = match index.get(&key) {
                Some(&t) => t,
                None => {
                    if states.len() >= opts.max_states {
                        return Err(DfaError::ClosureOverflow(opts.max_states));
                    }
                    let t = states.len();
                    index.insert(key.clone(), t);
                    states.push(key);
                    queue.push_back(t);
                    t
                }
            };
            row.push(t);
        }
        // rows are filled in queue order, which is index order
        debug_assert_eq!(table.len(), q * letters);
        table.extend(row);
    }

    let raw = RawDfa {
        letters,
        initial: 0,
        accepting: states.iter().map(|(_, acc)| *acc).collect(),
        table,
    }
    .minimize();
    if !raw.accepting.iter().any(|&a| a) {
        return Err(DfaError::UnsatisfiableTask);
    }
    Dfa::from_table(atoms.clone(), raw.initial, raw.accepting, raw.table)
}
