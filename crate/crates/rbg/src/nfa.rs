//! Thompson construction over the indexed rules.
//!
//! Every indexed action occurrence yields exactly one labelled transition,
//! so the state reached after performing action i is unique
//! (`action_entry[i]`). This makes the rules index a faithful summary of
//! the play so far: the set of legal continuations depends only on it.

use std::collections::HashMap;

use crate::ast::{IExpr, IndexedActionKind, IndexedRules};

#[derive(Debug, Clone)]
pub struct Nfa {
    pub start: usize,
    pub accept: usize,
    pub state_count: usize,
    /// Raw ε edges of the Thompson construction.
    pub eps: Vec<Vec<usize>>,
    /// Raw labelled edges: at most one per action index in the whole NFA.
    pub raw_edges: Vec<Vec<(usize, usize)>>,
    /// ε-closed per-state edge lists, sorted by action index.
    pub edges: Vec<Vec<(usize, usize)>>,
    /// True if the accept state is ε-reachable.
    pub accepting: Vec<bool>,
    /// `entry[i]` = the unique state reached by performing action i, for
    /// every action index labelling a transition of this NFA.
    pub action_entry: HashMap<usize, usize>,
}

/// The main NFA plus one NFA per pattern occurrence, keyed by the
/// pattern's action index.
#[derive(Debug, Clone)]
pub struct RulesAutomaton {
    pub main: Nfa,
    pub patterns: HashMap<usize, Nfa>,
}

pub fn build_automaton(rules: &IndexedRules) -> RulesAutomaton {
    let main = Nfa::build(&rules.root);
    let mut patterns = HashMap::new();
    for idx in 1..=rules.action_count() {
        if let IndexedActionKind::Pattern { body, .. } = &rules.action(idx).kind {
            patterns.insert(idx, Nfa::build(body));
        }
    }
    RulesAutomaton { main, patterns }
}

struct Builder {
    eps: Vec<Vec<usize>>,
    raw_edges: Vec<Vec<(usize, usize)>>,
    action_entry: HashMap<usize, usize>,
}

impl Builder {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.raw_edges.push(Vec::new());
        self.eps.len() - 1
    }

    fn fragment(&mut self, expr: &IExpr) -> (usize, usize) {
        match expr {
            IExpr::Action(idx) => {
                let a = self.state();
                let b = self.state();
                self.raw_edges[a].push((*idx, b));
                self.action_entry.insert(*idx, b);
                (a, b)
            }
            IExpr::Concat(items) => {
                let mut first: Option<usize> = None;
                let mut prev_out: Option<usize> = None;
                for item in items {
                    let (i, o) = self.fragment(item);
                    if let Some(p) = prev_out {
                        self.eps[p].push(i);
                    }
                    first.get_or_insert(i);
                    prev_out = Some(o);
                }
                match (first, prev_out) {
                    (Some(i), Some(o)) => (i, o),
                    _ => {
                        // Empty concatenation: a lone ε state.
                        let s = self.state();
                        (s, s)
                    }
                }
            }
            IExpr::Sum(items) => {
                let s = self.state();
                let t = self.state();
                for item in items {
                    let (i, o) = self.fragment(item);
                    self.eps[s].push(i);
                    self.eps[o].push(t);
                }
                (s, t)
            }
            IExpr::Star(inner) => {
                let s = self.state();
                let t = self.state();
                let (i, o) = self.fragment(inner);
                self.eps[s].push(i);
                self.eps[s].push(t);
                self.eps[o].push(i);
                self.eps[o].push(t);
                (s, t)
            }
        }
    }
}

impl Nfa {
    pub fn build(expr: &IExpr) -> Nfa {
        let mut b = Builder {
            eps: Vec::new(),
            raw_edges: Vec::new(),
            action_entry: HashMap::new(),
        };
        let (start, accept) = b.fragment(expr);
        let state_count = b.eps.len();

        let mut edges = Vec::with_capacity(state_count);
        let mut accepting = Vec::with_capacity(state_count);
        let mut closure_buf = vec![false; state_count];
        for q in 0..state_count {
            closure_buf.iter_mut().for_each(|x| *x = false);
            let mut stack = vec![q];
            closure_buf[q] = true;
            let mut out: Vec<(usize, usize)> = Vec::new();
            let mut acc = false;
            while let Some(s) = stack.pop() {
                if s == accept {
                    acc = true;
                }
                for &(idx, tgt) in &b.raw_edges[s] {
                    out.push((idx, tgt));
                }
                for &n in &b.eps[s] {
                    if !closure_buf[n] {
                        closure_buf[n] = true;
                        stack.push(n);
                    }
                }
            }
            out.sort_unstable();
            out.dedup();
            edges.push(out);
            accepting.push(acc);
        }
        Nfa {
            start,
            accept,
            state_count,
            eps: b.eps,
            raw_edges: b.raw_edges,
            edges,
            accepting,
            action_entry: b.action_entry,
        }
    }

    /// The state the engine resumes from for a rules index: the start for
    /// index 0, otherwise the state entered by performing that action.
    pub fn resume_state(&self, rules_index: usize) -> usize {
        if rules_index == 0 {
            self.start
        } else {
            self.action_entry[&rules_index]
        }
    }

    /// Whether the action-index word is a continuation accepted from
    /// `from`: simulates the NFA by subset construction.
    pub fn continuation_membership(&self, from: usize, word: &[usize]) -> bool {
        let mut current = vec![from];
        for &a in word {
            let mut next = Vec::new();
            for &q in &current {
                for &(idx, tgt) in &self.edges[q] {
                    if idx == a && !next.contains(&tgt) {
                        next.push(tgt);
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|&q| self.accepting[q])
    }

    /// Graphviz rendering; labels show action indices.
    pub fn to_dot(&self, rules: &IndexedRules, name: &str) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "digraph {name} {{");
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  node [shape=circle];");
        let _ = writeln!(out, "  q{} [shape=doublecircle];", self.accept);
        let _ = writeln!(out, "  start [shape=point];");
        let _ = writeln!(out, "  start -> q{};", self.start);
        for q in 0..self.state_count {
            for &n in &self.eps[q] {
                let _ = writeln!(out, "  q{q} -> q{n} [label=\"ε\", style=dashed];");
            }
            for &(idx, tgt) in &self.raw_edges[q] {
                let label = action_label(rules, idx);
                let _ = writeln!(out, "  q{q} -> q{tgt} [label=\"{idx}: {label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn action_label(rules: &IndexedRules, idx: usize) -> &'static str {
    match rules.action(idx).kind {
        IndexedActionKind::Shift(_) => "shift",
        IndexedActionKind::On(_) => "on",
        IndexedActionKind::Off(_) => "off",
        IndexedActionKind::Assign(..) => "assign",
        IndexedActionKind::Compare(..) => "compare",
        IndexedActionKind::Switch(_) => "switch",
        IndexedActionKind::SwitchKeeper => "switch",
        IndexedActionKind::Pattern { .. } => "pattern",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(i: usize) -> IExpr {
        IExpr::Action(i)
    }

    #[test]
    fn each_action_has_one_transition() {
        // (1 + 2 3)* — every index labels exactly one raw edge.
        let expr = IExpr::Star(Box::new(IExpr::Sum(vec![
            act(1),
            IExpr::Concat(vec![act(2), act(3)]),
        ])));
        let nfa = Nfa::build(&expr);
        let mut counts = HashMap::new();
        for q in 0..nfa.state_count {
            for &(idx, _) in &nfa.raw_edges[q] {
                *counts.entry(idx).or_insert(0) += 1;
            }
        }
        assert_eq!(counts, HashMap::from([(1, 1), (2, 1), (3, 1)]));
    }

    #[test]
    fn membership_basics() {
        // 1 (2 + 3)* — words over indices.
        let expr = IExpr::Concat(vec![
            act(1),
            IExpr::Star(Box::new(IExpr::Sum(vec![act(2), act(3)]))),
        ]);
        let nfa = Nfa::build(&expr);
        let from = nfa.start;
        assert!(nfa.continuation_membership(from, &[1]));
        assert!(nfa.continuation_membership(from, &[1, 2, 3, 2]));
        assert!(!nfa.continuation_membership(from, &[]));
        assert!(!nfa.continuation_membership(from, &[2]));
        assert!(!nfa.continuation_membership(from, &[1, 1]));
        // Continuations from after action 1.
        let entry = nfa.action_entry[&1];
        assert!(nfa.continuation_membership(entry, &[]));
        assert!(nfa.continuation_membership(entry, &[3, 3]));
        assert!(!nfa.continuation_membership(entry, &[1]));
    }

    #[test]
    fn flattened_edges_cross_epsilon_boundaries() {
        // (1 + 2) 3: from the start both 1 and 2 are available.
        let expr = IExpr::Concat(vec![IExpr::Sum(vec![act(1), act(2)]), act(3)]);
        let nfa = Nfa::build(&expr);
        let idxs: Vec<usize> = nfa.edges[nfa.start].iter().map(|&(i, _)| i).collect();
        assert_eq!(idxs, vec![1, 2]);
        // After 1 or 2, only 3.
        for i in 1..=2 {
            let e = &nfa.edges[nfa.action_entry[&i]];
            assert_eq!(e.iter().map(|&(i, _)| i).collect::<Vec<_>>(), vec![3]);
        }
    }

    #[test]
    fn accepting_via_epsilon() {
        let expr = IExpr::Star(Box::new(act(1)));
        let nfa = Nfa::build(&expr);
        assert!(nfa.accepting[nfa.start]);
        assert!(nfa.accepting[nfa.action_entry[&1]]);
    }

    #[test]
    fn resume_state_zero_is_start() {
        let nfa = Nfa::build(&act(1));
        assert_eq!(nfa.resume_state(0), nfa.start);
        assert_eq!(nfa.resume_state(1), nfa.action_entry[&1]);
    }
}
