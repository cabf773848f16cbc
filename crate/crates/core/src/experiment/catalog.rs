//! Formulas of the benchmark tasks and the running red/green example.

/// Touch red, then green, touching nothing else first (goal written as `g`).
pub const EXAMPLE1: &str = "(!r & !g) U ((r & !g) & X ((!r & !g) U g))";

/// Same task with the goal written as `g & !r`; its minimal automaton is
/// the four-state red/green DFA used throughout the tests.
pub const RED_GREEN: &str = "(!r & !g) U ((r & !g) & X ((!r & !g) U (g & !r)))";

fn only(p: &str, group: &[&str]) -> String {
    let mut parts = vec![p.to_string()];
    parts.extend(group.iter().filter(|q| **q != p).map(|q| format!("!{q}")));
    format!("({})", parts.join(" & "))
}

/// `p1 strict-then p2 strict-then ...`: nothing from `group` may hold
/// between consecutive goals, and each goal must hold alone.
pub fn strict_sequence(goals: &[&str], group: &[&str]) -> String {
    let wait = format!(
        "({})",
        group.iter().map(|q| format!("!{q}")).collect::<Vec<_>>().join(" & ")
    );
    let mut tail = only(goals[goals.len() - 1], group);
    for g in goals[..goals.len() - 1].iter().rev() {
        tail = format!("({} & X ({wait} U {tail}))", only(g, group));
    }
    format!("{wait} U {tail}")
}

/// `move into p1 then p2 then ...`: `F (p1 & X F (p2 & ...))`.
pub fn loose_sequence(goals: &[&str]) -> String {
    let mut tail = goals[goals.len() - 1].to_string();
    for g in goals[..goals.len() - 1].iter().rev() {
        tail = format!("({g} & X F {tail})");
    }
    format!("F {tail}")
}

/// Benchmark task `n` (1..=6) as `(formula, atoms)`.
pub fn benchmark_task(n: usize) -> Option<(String, Vec<&'static str>)> {
    const RBG: [&str; 3] = ["r", "b", "g"];
    const KWY: [&str; 3] = ["bk", "wt", "gy"];
    let regions = ["g1", "g2", "g3", "g4", "g5", "g6", "g7"];
    Some(match n {
        1 => (strict_sequence(&["r", "b", "g"], &RBG), RBG.to_vec()),
        2 => (
            strict_sequence(&["r", "b", "g", "r", "g", "b"], &RBG),
            RBG.to_vec(),
        ),
        3 => (
            format!(
                "({}) & ({})",
                strict_sequence(&["r", "b", "g"], &RBG),
                strict_sequence(&KWY, &KWY)
            ),
            RBG.iter().chain(KWY.iter()).copied().collect(),
        ),
        4 => (loose_sequence(&regions[..3]), regions[..3].to_vec()),
        5 => (loose_sequence(&regions[..5]), regions[..5].to_vec()),
        6 => (loose_sequence(&regions[..7]), regions[..7].to_vec()),
        _ => return None,
    })
}

/// Minimal automaton sizes reported for tasks 1..=6.
pub const REPORTED_DFA_STATES: [usize; 6] = [5, 8, 17, 4, 6, 8];
