//! Static analysis of the rules: strong straightness (the four-function
//! recursion over ℕ ∪ {⊥, ∞}) and properness diagnostics.
//!
//! Strong straightness bounds the number of non-switch modifiers between
//! two consecutive switches over all words of the application language; it
//! is the default runtime cap for the move generator.

use crate::ast::{AbstractDescription, ActionKind, RulesExpr};
use crate::error::{Diagnostic, Severity, Span};

/// ℕ extended with ⊥ (empty set, absorbing in addition) and ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StraightValue {
    Bottom,
    Finite(u64),
    Infinite,
}

use StraightValue::{Bottom, Finite, Infinite};

impl StraightValue {
    /// ⊥ + x = ⊥ (also ∞ + ⊥ = ⊥), ∞ + n = ∞, otherwise ordinary addition.
    pub fn add(self, other: StraightValue) -> StraightValue {
        match (self, other) {
            (Bottom, _) | (_, Bottom) => Bottom,
            (Infinite, _) | (_, Infinite) => Infinite,
            (Finite(a), Finite(b)) => Finite(a.saturating_add(b)),
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Finite(n) if n > 0) || self == Infinite
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Finite(n) => Some(n),
            _ => None,
        }
    }
}

impl std::fmt::Display for StraightValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bottom => write!(f, "bottom"),
            Finite(n) => write!(f, "{n}"),
            Infinite => write!(f, "infinite"),
        }
    }
}

/// Maximum switch-free modifier counts over suffixes, application-language
/// prefixes, factors, and whole words of an expression's language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StraightQuad {
    pub msuff: StraightValue,
    pub mpref: StraightValue,
    pub mfact: StraightValue,
    pub mword: StraightValue,
}

impl StraightQuad {
    fn uniform(v: StraightValue) -> StraightQuad {
        StraightQuad { msuff: v, mpref: v, mfact: v, mword: v }
    }
}

/// Computes the quad bottom-up in one linear pass.
pub fn straight_quad(expr: &RulesExpr) -> StraightQuad {
    straight_quad_counted(expr).0
}

/// As [`straight_quad`], also returning the number of AST nodes visited.
pub fn straight_quad_counted(expr: &RulesExpr) -> (StraightQuad, usize) {
    let mut nodes = 0;
    let quad = go(expr, &mut nodes);
    (quad, nodes)
}

fn go(expr: &RulesExpr, nodes: &mut usize) -> StraightQuad {
    *nodes += 1;
    match expr {
        RulesExpr::Action(spec) => match &spec.kind {
            ActionKind::Switch(_) | ActionKind::SwitchKeeper => StraightQuad {
                msuff: Finite(0),
                mpref: Finite(0),
                mfact: Finite(0),
                mword: Bottom,
            },
            ActionKind::Off(_) | ActionKind::Assign(..) => StraightQuad::uniform(Finite(1)),
            ActionKind::Pattern { body, .. } => {
                // A pattern is transparent: the application language enters
                // the body (contributing up to MPref of it) and the outer
                // word continues past the check. All four components equal
                // MPref of the body, which makes the worked examples come
                // out right (e.g. the [a]{b}{?[c][d]}[e]... case).
                let inner = go(body, nodes);
                StraightQuad::uniform(inner.mpref)
            }
            _ => StraightQuad::uniform(Finite(0)),
        },
        RulesExpr::Sum(items) => {
            let mut acc = StraightQuad::uniform(Bottom);
            for item in items {
                let q = go(item, nodes);
                acc.msuff = acc.msuff.max(q.msuff);
                acc.mpref = acc.mpref.max(q.mpref);
                acc.mfact = acc.mfact.max(q.mfact);
                acc.mword = acc.mword.max(q.mword);
            }
            acc
        }
        RulesExpr::Concat(items) => {
            let mut iter = items.iter();
            let mut acc = match iter.next() {
                Some(first) => go(first, nodes),
                None => StraightQuad::uniform(Finite(0)),
            };
            for item in iter {
                let b = go(item, nodes);
                acc = StraightQuad {
                    msuff: acc.msuff.add(b.mword).max(b.msuff),
                    mpref: acc.mpref.max(acc.mword.add(b.mpref)),
                    mfact: acc
                        .mfact
                        .max(acc.msuff.add(b.mpref))
                        .max(b.mfact),
                    mword: acc.mword.add(b.mword),
                };
            }
            acc
        }
        RulesExpr::Star(inner) => {
            let q = go(inner, nodes);
            if q.mword.is_positive() {
                StraightQuad::uniform(Infinite)
            } else {
                StraightQuad {
                    msuff: q.msuff,
                    mpref: q.mpref,
                    mfact: q.msuff.add(q.mpref).max(q.mfact),
                    mword: Finite(0),
                }
            }
        }
    }
}

/// Strong straightness of the whole description: MFact of the rules.
pub fn strong_straightness(desc: &AbstractDescription) -> StraightValue {
    straight_quad(&desc.rules).mfact
}

/// The default runtime modifier cap when strong straightness is infinite.
pub const FALLBACK_CAP: usize = 1024;

/// The modifier cap the engine should run with.
pub fn recommended_cap(desc: &AbstractDescription) -> usize {
    match strong_straightness(desc) {
        Finite(n) => (n as usize).max(1),
        _ => FALLBACK_CAP,
    }
}

/// Static properness diagnostics.
pub fn validate(desc: &AbstractDescription) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut pattern_switch_spans = Vec::new();
    find_pattern_switches(&desc.rules, false, &mut pattern_switch_spans);
    for span in pattern_switch_spans {
        out.push(Diagnostic {
            severity: Severity::Error,
            code: "PatternContainsSwitch",
            message: "a move-check body must be a regular expression without switches"
                .to_string(),
            span: Some(span),
        });
    }

    if !contains_switch(&desc.rules) {
        out.push(Diagnostic {
            severity: Severity::Warning,
            code: "NoSwitchInRules",
            message: "the rules contain no switch, so no move can ever be completed"
                .to_string(),
            span: None,
        });
    }

    let k = strong_straightness(desc);
    if k == Infinite {
        out.push(Diagnostic {
            severity: Severity::Warning,
            code: "InfiniteStrongStraightness",
            message: format!(
                "strong straightness is infinite; the game may still be proper, \
                 but the engine will enforce a runtime cap of {FALLBACK_CAP} modifiers \
                 per move"
            ),
            span: None,
        });
    }
    out.push(Diagnostic {
        severity: Severity::Info,
        code: "StrongStraightness",
        message: format!(
            "strong straightness is {k}; recommended runtime cap is {}",
            recommended_cap(desc)
        ),
        span: None,
    });
    out
}

fn contains_switch(expr: &RulesExpr) -> bool {
    match expr {
        RulesExpr::Action(spec) => match &spec.kind {
            ActionKind::Switch(_) | ActionKind::SwitchKeeper => true,
            ActionKind::Pattern { .. } => false,
            _ => false,
        },
        RulesExpr::Sum(items) | RulesExpr::Concat(items) => {
            items.iter().any(contains_switch)
        }
        RulesExpr::Star(inner) => contains_switch(inner),
    }
}

fn find_pattern_switches(expr: &RulesExpr, in_pattern: bool, out: &mut Vec<Span>) {
    match expr {
        RulesExpr::Action(spec) => match &spec.kind {
            ActionKind::Switch(_) | ActionKind::SwitchKeeper if in_pattern => {
                out.push(spec.span)
            }
            ActionKind::Pattern { body, .. } => find_pattern_switches(body, true, out),
            _ => {}
        },
        RulesExpr::Sum(items) | RulesExpr::Concat(items) => {
            for item in items {
                find_pattern_switches(item, in_pattern, out);
            }
        }
        RulesExpr::Star(inner) => find_pattern_switches(inner, in_pattern, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;
    use crate::parser::parse_description;

    fn desc_with_rules(rules: &str) -> AbstractDescription {
        let src = format!(
            "#players = p1(10), p2(10)
             #pieces = a, b, c, d, e, f, g, h, i, x
             #variables =
             #board = v [a] {{dir: v}}
             #rules = {rules}"
        );
        parse_description(&tokenize(&src).unwrap()).unwrap()
    }

    fn quad(rules: &str) -> StraightQuad {
        straight_quad(&desc_with_rules(rules).rules)
    }

    #[test]
    fn worked_pattern_example() {
        let q = quad("[a]{b}{? [c][d]}[e] ->> [f]({g}+[h])[i]");
        assert_eq!(q.msuff, Finite(3));
        assert_eq!(q.mpref, Finite(4));
        assert_eq!(q.mfact, Finite(4));
        assert_eq!(q.mword, Bottom);
    }

    #[test]
    fn factor_between_switches() {
        assert_eq!(quad("[a]->>[b][c][d]->>[e][f]").mfact, Finite(3));
    }

    #[test]
    fn word_through_optional_switch() {
        assert_eq!(quad("[a][b](->>+[c])[d]").mword, Finite(4));
    }

    #[test]
    fn star_over_a_modifier_is_infinite() {
        assert_eq!(quad("[x]*").mword, Infinite);
        assert_eq!(quad("[x]*").mfact, Infinite);
    }

    #[test]
    fn star_over_modifier_free_body_stays_finite() {
        let q = quad("(dir {a})* [b] ->>");
        assert_eq!(q.mfact, Finite(1));
    }

    #[test]
    fn single_switch_has_zero_straightness() {
        assert_eq!(quad("->>").mfact, Finite(0));
        assert_eq!(quad("->p1").mword, Bottom);
    }

    #[test]
    fn quad_ordering_invariants() {
        for rules in [
            "[a]{b}{? [c][d]}[e] ->> [f]({g}+[h])[i]",
            "[a]->>[b][c][d]->>[e][f]",
            "[a][b](->>+[c])[d]",
            "(dir {a})* [b] ->>",
            "->> (dir + [a] ->>)* {b}",
        ] {
            let q = quad(rules);
            assert!(q.mword <= q.mpref, "{rules}");
            assert!(q.mpref <= q.mfact, "{rules}");
            assert!(q.mword <= q.msuff, "{rules}");
            assert!(q.msuff <= q.mfact, "{rules}");
        }
    }

    #[test]
    fn value_arithmetic() {
        assert_eq!(Infinite.add(Finite(3)), Infinite);
        assert_eq!(Bottom.add(Finite(3)), Bottom);
        assert_eq!(Infinite.add(Bottom), Bottom);
        assert_eq!(Finite(2).add(Finite(3)), Finite(5));
        assert!(Bottom < Finite(0));
        assert!(Finite(u64::MAX) < Infinite);
    }

    #[test]
    fn linear_pass_node_count() {
        let d = desc_with_rules("([a] + dir {b})* ->> [c]");
        let (_, nodes) = straight_quad_counted(&d.rules);
        // star, sum, concat(2), action×5 — one visit per AST node.
        fn count(e: &RulesExpr) -> usize {
            match e {
                RulesExpr::Action(spec) => match &spec.kind {
                    ActionKind::Pattern { body, .. } => 1 + count(body),
                    _ => 1,
                },
                RulesExpr::Sum(v) | RulesExpr::Concat(v) => {
                    1 + v.iter().map(count).sum::<usize>()
                }
                RulesExpr::Star(i) => 1 + count(i),
            }
        }
        assert_eq!(nodes, count(&d.rules));
    }

    #[test]
    fn validate_reports_pattern_switch() {
        let d = desc_with_rules("{? dir ->p1 } ->>");
        let diags = validate(&d);
        assert!(diags.iter().any(|d| d.code == "PatternContainsSwitch"
            && d.severity == Severity::Error));
    }

    #[test]
    fn validate_reports_missing_switch_and_cap() {
        let d = desc_with_rules("dir [a]");
        let diags = validate(&d);
        assert!(diags.iter().any(|d| d.code == "NoSwitchInRules"));
        assert!(diags.iter().any(|d| d.code == "StrongStraightness"
            && d.severity == Severity::Info));
    }

    #[test]
    fn validate_reports_infinite_straightness() {
        let d = desc_with_rules("([x] dir)* ->>");
        let diags = validate(&d);
        assert!(diags.iter().any(|d| d.code == "InfiniteStrongStraightness"
            && d.severity == Severity::Warning));
        assert_eq!(recommended_cap(&d), FALLBACK_CAP);
    }

    #[test]
    fn recommended_cap_matches_straightness() {
        let d = desc_with_rules("[a][b] ->> [c] ->p1");
        assert_eq!(strong_straightness(&d), Finite(2));
        assert_eq!(recommended_cap(&d), 2);
    }
}
