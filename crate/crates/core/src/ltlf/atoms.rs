use serde::{Deserialize, Serialize};

use super::LtlfError;

/// Upper bound on atoms per set; valuations are packed into a `u32`.
pub const MAX_ATOMS: usize = 32;

const RESERVED: &[&str] = &["X", "N", "U", "F", "G", "last", "true", "false"];

/// An ordered set of atomic propositions.
///
/// Names are kept sorted so that valuation bit `i` always refers to the
/// `i`-th name in lexicographic order, independent of declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct AtomSet {
    names: Vec<String>,
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&name)
}

impl AtomSet {
    pub fn new<I, S>(names: I) -> Result<Self, LtlfError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        for n in &names {
            if !is_valid_name(n) {
                return Err(LtlfError::InvalidProposition(n.clone()));
            }
        }
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(LtlfError::DuplicateProposition(w[0].clone()));
            }
        }
        if names.len() > MAX_ATOMS {
            return Err(LtlfError::TooManyAtoms(names.len()));
        }
        Ok(AtomSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// Number of distinct valuations, `2^|AP|`.
    pub fn valuation_count(&self) -> usize {
        1usize << self.names.len()
    }

    /// Builds the valuation in which exactly `names` hold.
    pub fn state<I, S>(&self, names: I) -> Result<TraceState, LtlfError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u32;
        for n in names {
            let n = n.as_ref();
            let i = self
                .index_of(n)
                .ok_or_else(|| LtlfError::UnknownProposition(n.to_string()))?;
            bits |= 1 << i;
        }
        Ok(TraceState(bits))
    }

    pub fn valuations(&self) -> impl Iterator<Item = TraceState> {
        (0..self.valuation_count() as u32).map(TraceState)
    }

    /// Renders a valuation as `{a, b}`.
    pub fn describe(&self, s: TraceState) -> String {
        let held: Vec<&str> = (0..self.len())
            .filter(|&i| s.holds(i))
            .map(|i| self.name(i))
            .collect();
        format!("{{{}}}", held.join(", "))
    }
}

impl TryFrom<Vec<String>> for AtomSet {
    type Error = LtlfError;
    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        AtomSet::new(v)
    }
}

impl From<AtomSet> for Vec<String> {
    fn from(a: AtomSet) -> Self {
        a.names
    }
}

/// One letter of a trace: the set of propositions that hold, as a bitmask
/// over an [`AtomSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TraceState(pub u32);

impl TraceState {
    pub const EMPTY: TraceState = TraceState(0);

    pub fn holds(self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite, non-empty sequence of trace states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace(Vec<TraceState>);

impl Trace {
    pub fn new(states: Vec<TraceState>) -> Result<Self, LtlfError> {
        if states.is_empty() {
            return Err(LtlfError::EmptyTrace);
        }
        Ok(Trace(states))
    }

    pub fn single(s: TraceState) -> Self {
        Trace(vec![s])
    }

    pub fn states(&self) -> &[TraceState] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the final state, `n`.
    pub fn last_index(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, i: usize) -> TraceState {
        self.0[i]
    }
}

/// Every trace of length `1..=max_len` over `2^atoms` letters, shortest first.
pub fn all_traces(atoms: usize, max_len: usize) -> impl Iterator<Item = Trace> {
    let letters = 1u64 << atoms;
    (1..=max_len).flat_map(move |len| {
        let total = letters.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut states = Vec::with_capacity(len);
            for _ in 0..len {
                states.push(TraceState((code % letters) as u32));
                code /= letters;
            }
            Trace(states)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_sorted_and_validated() {
        let a = AtomSet::new(["r", "g", "b"]).unwrap();
        assert_eq!(a.names(), &["b", "g", "r"]);
        assert_eq!(a.index_of("r"), Some(2));
        assert!(matches!(
            AtomSet::new(["r", "r"]),
            Err(LtlfError::DuplicateProposition(_))
        ));
        assert!(matches!(
            AtomSet::new(["1x"]),
            Err(LtlfError::InvalidProposition(_))
        ));
        assert!(matches!(
            AtomSet::new(["G"]),
            Err(LtlfError::InvalidProposition(_))
        ));
        assert!(AtomSet::new(["g_1", "_x"]).is_ok());
    }

    #[test]
    fn empty_trace_rejected() {
        assert!(matches!(Trace::new(vec![]), Err(LtlfError::EmptyTrace)));
    }

    #[test]
    fn trace_enumeration_counts() {
        // 4 + 16 + 64
        assert_eq!(all_traces(2, 3).count(), 84);
        assert!(all_traces(2, 3).all(|t| t.states().iter().all(|s| s.0 < 4)));
    }
}
