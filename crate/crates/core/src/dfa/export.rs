use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Dfa, DfaError};
use crate::ltlf::{parse, AtomSet, Formula, Style};

impl Dfa {
    /// Graphviz rendering: doubled circles for accepting states, dashed
    /// outlines for error states, guards as edge labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph dfa {\n    rankdir=LR;\n    node [shape=circle];\n    __start [shape=point];\n");
        for q in 0..self.num_states() {
            let name = Dfa::state_name(q);
            match (self.is_accepting(q), self.is_error(q)) {
                (true, _) => writeln!(out, "    {name} [shape=doublecircle];"),
                (_, true) => writeln!(out, "    {name} [style=dashed];"),
                _ => writeln!(out, "    {name};"),
            }
            .unwrap();
        }
        writeln!(out, "    __start -> {};", Dfa::state_name(self.initial())).unwrap();
        for e in self.edges() {
            writeln!(
                out,
                "    {} -> {} [label=\"{}\"];",
                Dfa::state_name(e.from),
                Dfa::state_name(e.to),
                self.guard_text(&e.guard, Style::Ascii)
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }

    /// RDDL-style encoding of the automaton as one enumerated state fluent
    /// `fQ`, its transition chain, the acceptance reward and termination.
    pub fn to_rddl(&self, reward: f64) -> String {
        let names: Vec<String> = (0..self.num_states()).map(Dfa::state_name).collect();
        let mut out = String::new();
        out.push_str("pvariables {\n");
        writeln!(
            out,
            "    fQ : {{state-fluent,{{{}}},default=@{}}};",
            names.iter().map(|n| format!("@{n}")).collect::<Vec<_>>().join(", "),
            names[self.initial()]
        )
        .unwrap();
        out.push_str("};\ncpfs{\n");
        for (i, e) in self.edges().iter().enumerate() {
            let guard = self.guard_text(&e.guard, Style::Rddl);
            let guard = match e.guard.expr() {
                Formula::And(_) | Formula::Or(_) => format!("({guard})"),
                _ => guard,
            };
            let lead = if i == 0 { "    fQ' = if" } else { "          else if" };
            writeln!(
                out,
                "{lead}(fQ == @{} ^ {guard}) then @{}",
                names[e.from], names[e.to]
            )
            .unwrap();
        }
        out.push_str("          else fQ;\n};\n");
        let terms: Vec<String> = self
            .accepting_states()
            .into_iter()
            .map(|q| format!("{reward}*(fQ == @{})", names[q]))
            .collect();
        writeln!(out, "reward = {};", terms.join(" + ")).unwrap();
        let stops: Vec<String> = (0..self.num_states())
            .filter(|&q| self.is_terminal(q))
            .map(|q| format!("fQ == @{};", names[q]))
            .collect();
        writeln!(out, "termination {{{}}};", stops.join(" ")).unwrap();
        out
    }

    pub fn to_json(&self) -> DfaJson {
        let name = |q: usize| Dfa::state_name(q);
        DfaJson {
            atoms: self.atoms().names().to_vec(),
            states: (0..self.num_states()).map(name).collect(),
            initial: name(self.initial()),
            accepting: self.accepting_states().into_iter().map(name).collect(),
            errors: self.error_states().into_iter().map(name).collect(),
            edges: self
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    from: name(e.from),
                    guard: self.guard_text(&e.guard, Style::Ascii),
                    to: name(e.to),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &DfaJson) -> Result<Dfa, DfaError> {
        let atoms = AtomSet::new(j.atoms.iter().cloned())
            .map_err(|e| DfaError::Malformed(e.to_string()))?;
        let lookup = |n: &str| {
            j.states
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| DfaError::Malformed(format!("unknown state '{n}'")))
        };
        let mut accepting = vec![false; j.states.len()];
        for a in &j.accepting {
            accepting[lookup(a)?] = true;
        }
        let mut edges = Vec::with_capacity(j.edges.len());
        for e in &j.edges {
            let g = parse(&e.guard, &atoms).map_err(|err| DfaError::Malformed(err.to_string()))?;
            edges.push((lookup(&e.from)?, g, lookup(&e.to)?));
        }
        let d = Dfa::from_edges(atoms, j.states.len(), lookup(&j.initial)?, accepting, &edges)?;
        let declared: Result<Vec<usize>, _> = j.errors.iter().map(|n| lookup(n)).collect();
        let mut declared = declared?;
        declared.sort_unstable();
        if declared != d.error_states() {
            return Err(DfaError::Malformed("declared error states disagree with reachability".into()));
        }
        Ok(d)
    }
}

/// Neutral automaton interchange format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub atoms: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub errors: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: String,
    pub guard: String,
    pub to: String,
}

fn state_index(name: &str) -> Result<usize, DfaError> {
    name.strip_prefix("@q")
        .and_then(|n| n.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .map(|n| n - 1)
        .ok_or_else(|| DfaError::Malformed(format!("bad state reference '{name}'")))
}

/// Reads back the `if(fQ == @qI ^ guard) then @qJ` rows of an exported
/// cpfs block as `(from, guard, to)` triples.
pub fn parse_rddl_transitions(text: &str, atoms: &AtomSet) -> Result<Vec<(usize, Formula, usize)>, DfaError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let Some(pos) = line.find("if(fQ == ") else {
            continue;
        };
        let body = &line[pos + "if(fQ == ".len()..];
        let (cond, target) = body
            .rsplit_once(") then ")
            .ok_or_else(|| DfaError::Malformed(format!("no target in '{line}'")))?;
        let (from, guard) = cond
            .split_once(" ^ ")
            .ok_or_else(|| DfaError::Malformed(format!("no guard in '{line}'")))?;
        let guard = parse(guard, atoms).map_err(|e| DfaError::Malformed(e.to_string()))?;
        out.push((state_index(from)?, guard, state_index(target.trim())?));
    }
    Ok(out)
}
