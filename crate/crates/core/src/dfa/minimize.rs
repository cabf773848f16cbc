use std::collections::{HashMap, VecDeque};

use super::Dfa;

/// Raw automaton: dense table, no guards.
#[derive(Debug, Clone)]
pub(crate) struct RawDfa {
    pub letters: usize,
    pub initial: usize,
    pub accepting: Vec<bool>,
    pub table: Vec<usize>,
}

impl RawDfa {
    fn len(&self) -> usize {
        self.accepting.len()
    }

    fn succ(&self, q: usize, v: usize) -> usize {
        self.table[q * self.letters + v]
    }

    /// Renumbers states in breadth-first order from the initial state,
    /// exploring valuations in ascending bit order, dropping unreachable ones.
    fn bfs_renumber(&self) -> RawDfa {
        let mut order = vec![usize::MAX; self.len()];
        let mut seq = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        order[self.initial] = 0;
        seq.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for v in 0..self.letters {
                let t = self.succ(q, v);
                if order[t] == usize::MAX {
                    order[t] = seq.len();
                    seq.push(t);
                    queue.push_back(t);
                }
            }
        }
        let mut table = Vec::with_capacity(seq.len() * self.letters);
        for &q in &seq {
            table.extend((0..self.letters).map(|v| order[self.succ(q, v)]));
        }
        RawDfa {
            letters: self.letters,
            initial: 0,
            accepting: seq.iter().map(|&q| self.accepting[q]).collect(),
            table,
        }
    }

    /// Moore-style partition refinement to the coarsest congruence that
    /// respects acceptance, followed by BFS renumbering.
    pub fn minimize(&self) -> RawDfa {
        let reach = self.bfs_renumber();
        let n = reach.len();
        let mut class: Vec<usize> = relabel(reach.accepting.iter().map(|&a| (a as usize, Vec::new())));
        loop {
            let count = class.iter().max().map_or(0, |m| m + 1);
            let refined = relabel((0..n).map(|q| {
                let sig: Vec<usize> = (0..reach.letters).map(|v| class[reach.succ(q, v)]).collect();
                (class[q], sig)
            }));
            let new_count = refined.iter().max().map_or(0, |m| m + 1);
            class = refined;
            if new_count == count {
                break;
            }
        }
        let k = class.iter().max().map_or(0, |m| m + 1);
        let mut rep = vec![usize::MAX; k];
        for q in 0..n {
            if rep[class[q]] == usize::MAX {
                rep[class[q]] = q;
            }
        }
        let mut table = Vec::with_capacity(k * reach.letters);
        for &q in &rep {
            table.extend((0..reach.letters).map(|v| class[reach.succ(q, v)]));
        }
        RawDfa {
            letters: reach.letters,
            initial: class[reach.initial],
            accepting: rep.iter().map(|&q| reach.accepting[q]).collect(),
            table,
        }
        .bfs_renumber()
    }
}

fn relabel<I>(sigs: I) -> Vec<usize>
where
    I: Iterator<Item = (usize, Vec<usize>)>,
{
    let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    sigs.map(|s| {
        let next = ids.len();
        *ids.entry(s).or_insert(next)
    })
    .collect()
}

/// Language-preserving minimization; removes unreachable states and merges
/// equivalent ones. States come back numbered in BFS order.
pub fn minimize(d: &Dfa) -> Dfa {
    let raw = RawDfa {
        letters: d.atoms().valuation_count(),
        initial: d.initial(),
        accepting: d.accepting_mask().to_vec(),
        table: d.table().to_vec(),
    }
    .minimize();
    Dfa::from_table(d.atoms().clone(), raw.initial, raw.accepting, raw.table)
        .expect("minimization preserves well-formedness")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::{all_traces, AtomSet};

    #[test]
    fn duplicated_accepting_sinks_merge() {
        let atoms = AtomSet::new(["a"]).unwrap();
        // q0 --a--> q1, q0 --!a--> q2; q1, q2 both accepting sinks
        let d = Dfa::from_table(atoms, 0, vec![false, true, true], vec![2, 1, 1, 1, 2, 2]).unwrap();
        let m = minimize(&d);
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.accepting_states().len(), 1);
    }

    #[test]
    fn redundant_tracking_bit_halves_state_count() {
        // base: parity-of-a automaton (2 states); product with a bit that
        // flips on every letter and is never observed by acceptance
        let atoms = AtomSet::new(["a"]).unwrap();
        let base = [[0usize, 1], [1, 0]];
        let mut table = Vec::new();
        let mut accepting = Vec::new();
        for q in 0..2 {
            for bit in 0..2 {
                accepting.push(q == 1);
                for v in 0..2 {
                    table.push(base[q][v] * 2 + (1 - bit));
                }
            }
        }
        let d = Dfa::from_table(atoms, 0, accepting, table).unwrap();
        let m = minimize(&d);
        assert_eq!(d.num_states(), 4);
        assert_eq!(m.num_states(), 2);
        for t in all_traces(1, 6) {
            assert_eq!(d.accepts(&t), m.accepts(&t));
        }
    }

    #[test]
    fn unreachable_states_dropped() {
        let atoms = AtomSet::new(["a"]).unwrap();
        let d = Dfa::from_table(atoms, 0, vec![true, false], vec![0, 0, 1, 1]).unwrap();
        assert_eq!(minimize(&d).num_states(), 1);
    }
}
