//! The abstract description: the validated, integer-interned form of a
//! game produced by the parser.
//!
//! Name spaces (players, pieces, non-player variables, edge labels) are
//! pairwise disjoint, so every identifier in the rules resolves uniquely.
//! Players double as assignable variables; the combined variable index
//! space lists players first, then the declared variables.

use serde::Serialize;

use crate::error::Span;

pub type PlayerId = usize;
pub type PieceId = usize;
pub type VarId = usize;
pub type DirId = usize;
pub type VertexId = usize;

/// The board: a directed graph with labelled edges and an initial piece
/// on every vertex. `delta` is a dense vertices × dirs table with
/// `NO_TARGET` marking absent edges.
#[derive(Debug, Clone, Serialize)]
pub struct BoardGraph {
    pub vertex_names: Vec<String>,
    pub dirs: Vec<String>,
    pub initial_pieces: Vec<PieceId>,
    pub delta: Vec<u32>,
}

pub const NO_TARGET: u32 = u32::MAX;

impl BoardGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn target(&self, v: VertexId, d: DirId) -> Option<VertexId> {
        match self.delta[v * self.dirs.len() + d] {
            NO_TARGET => None,
            t => Some(t as VertexId),
        }
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|n| n == name)
    }
}

/// An arithmetic expression over naturals, variables, and piece counts.
/// Division is truncating integer division.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ArithExpr {
    Const(i64),
    Var(VarId),
    /// Number of board vertices currently holding the piece.
    PieceCount(PieceId),
    Add(Box<ArithExpr>, Box<ArithExpr>),
    Sub(Box<ArithExpr>, Box<ArithExpr>),
    Mul(Box<ArithExpr>, Box<ArithExpr>),
    Div(Box<ArithExpr>, Box<ArithExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// One primitive action occurrence in the rules.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ActionKind {
    /// Move the current position along an edge; invalid if absent.
    Shift(DirId),
    /// Check that the piece at the current position is in the set.
    On(Vec<PieceId>),
    /// Replace the piece at the current position. A modifier.
    Off(PieceId),
    /// Set a variable; invalid if the value is outside 0..=bound. A modifier.
    Assign(VarId, ArithExpr),
    /// Compare two expressions; invalid if the relation fails.
    Compare(ArithExpr, CmpOp, ArithExpr),
    /// Give control to a player. A modifier.
    Switch(PlayerId),
    /// Give control to the keeper. A modifier.
    SwitchKeeper,
    /// A move-check `{? M}` (positive) or `{! M}` (negative); the body is
    /// switch-free and is evaluated without changing the state.
    Pattern { positive: bool, body: Box<RulesExpr> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionSpec {
    pub kind: ActionKind,
    #[serde(skip)]
    pub span: Span,
}

impl ActionSpec {
    /// Offs, assignments, and switches are modifiers.
    pub fn is_modifier(&self) -> bool {
        matches!(
            self.kind,
            ActionKind::Off(_)
                | ActionKind::Assign(..)
                | ActionKind::Switch(_)
                | ActionKind::SwitchKeeper
        )
    }

    pub fn is_switch(&self) -> bool {
        matches!(self.kind, ActionKind::Switch(_) | ActionKind::SwitchKeeper)
    }
}

/// The rules: a regular expression over actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RulesExpr {
    Action(ActionSpec),
    Sum(Vec<RulesExpr>),
    Concat(Vec<RulesExpr>),
    Star(Box<RulesExpr>),
}

/// A fully validated game description.
#[derive(Debug, Clone, Serialize)]
pub struct AbstractDescription {
    /// (name, score bound) per player, in declaration order.
    pub players: Vec<(String, u64)>,
    pub pieces: Vec<String>,
    /// Non-player variables: (name, bound).
    pub variables: Vec<(String, u64)>,
    pub board: BoardGraph,
    pub rules: RulesExpr,
}

impl AbstractDescription {
    /// Bound of a combined-space variable (players first).
    pub fn var_bound(&self, v: VarId) -> u64 {
        if v < self.players.len() {
            self.players[v].1
        } else {
            self.variables[v - self.players.len()].1
        }
    }

    pub fn var_count(&self) -> usize {
        self.players.len() + self.variables.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        if v < self.players.len() {
            &self.players[v].0
        } else {
            &self.variables[v - self.players.len()].0
        }
    }

    pub fn player_name(&self, p: PlayerId) -> &str {
        &self.players[p].0
    }
}

/// The rules with every action occurrence numbered 1..N in textual order
/// (pattern bodies included, a pattern's own index preceding its body's).
/// Index 0 is reserved for the start of the rules.
#[derive(Debug, Clone, Serialize)]
pub struct IndexedRules {
    pub root: IExpr,
    /// `actions[i]` describes action index i; slot 0 is `None`.
    pub actions: Vec<Option<IndexedAction>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexedAction {
    pub kind: IndexedActionKind,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, Serialize)]
pub enum IndexedActionKind {
    Shift(DirId),
    On(Vec<PieceId>),
    Off(PieceId),
    Assign(VarId, ArithExpr),
    Compare(ArithExpr, CmpOp, ArithExpr),
    Switch(PlayerId),
    SwitchKeeper,
    Pattern { positive: bool, body: IExpr },
}

impl IndexedAction {
    pub fn is_modifier(&self) -> bool {
        matches!(
            self.kind,
            IndexedActionKind::Off(_)
                | IndexedActionKind::Assign(..)
                | IndexedActionKind::Switch(_)
                | IndexedActionKind::SwitchKeeper
        )
    }

    pub fn is_switch(&self) -> bool {
        matches!(self.kind, IndexedActionKind::Switch(_) | IndexedActionKind::SwitchKeeper)
    }
}

/// A rules expression whose leaves are indices into `IndexedRules.actions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum IExpr {
    Action(usize),
    Sum(Vec<IExpr>),
    Concat(Vec<IExpr>),
    Star(Box<IExpr>),
}

/// Numbers every action occurrence left to right, starting from 1.
pub fn index_rules(rules: &RulesExpr) -> IndexedRules {
    let mut actions: Vec<Option<IndexedAction>> = vec![None];
    let root = index_expr(rules, &mut actions);
    IndexedRules { root, actions }
}

fn index_expr(expr: &RulesExpr, actions: &mut Vec<Option<IndexedAction>>) -> IExpr {
    match expr {
        RulesExpr::Sum(items) => {
            IExpr::Sum(items.iter().map(|e| index_expr(e, actions)).collect())
        }
        RulesExpr::Concat(items) => {
            IExpr::Concat(items.iter().map(|e| index_expr(e, actions)).collect())
        }
        RulesExpr::Star(inner) => IExpr::Star(Box::new(index_expr(inner, actions))),
        RulesExpr::Action(spec) => {
            let idx = actions.len();
            actions.push(None);
            let kind = match &spec.kind {
                ActionKind::Shift(d) => IndexedActionKind::Shift(*d),
                ActionKind::On(ps) => IndexedActionKind::On(ps.clone()),
                ActionKind::Off(p) => IndexedActionKind::Off(*p),
                ActionKind::Assign(v, e) => IndexedActionKind::Assign(*v, e.clone()),
                ActionKind::Compare(a, op, b) => {
                    IndexedActionKind::Compare(a.clone(), *op, b.clone())
                }
                ActionKind::Switch(p) => IndexedActionKind::Switch(*p),
                ActionKind::SwitchKeeper => IndexedActionKind::SwitchKeeper,
                ActionKind::Pattern { positive, body } => IndexedActionKind::Pattern {
                    positive: *positive,
                    body: index_expr(body, actions),
                },
            };
            actions[idx] = Some(IndexedAction { kind, span: spec.span });
            IExpr::Action(idx)
        }
    }
}

impl IndexedRules {
    pub fn action(&self, idx: usize) -> &IndexedAction {
        self.actions[idx].as_ref().expect("action index 0 has no action")
    }

    /// Number of indexed actions (N); valid indices are 1..=N.
    pub fn action_count(&self) -> usize {
        self.actions.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(d: DirId) -> RulesExpr {
        RulesExpr::Action(ActionSpec { kind: ActionKind::Shift(d), span: Span::default() })
    }

    #[test]
    fn single_action_gets_index_one() {
        let ir = index_rules(&shift(0));
        assert_eq!(ir.action_count(), 1);
        assert_eq!(ir.root, IExpr::Action(1));
    }

    #[test]
    fn indices_follow_text_order_through_patterns() {
        // a ({? b c} + d) e  →  a=1, pattern=2, b=3, c=4, d=5, e=6
        let pattern = RulesExpr::Action(ActionSpec {
            kind: ActionKind::Pattern {
                positive: true,
                body: Box::new(RulesExpr::Concat(vec![shift(1), shift(2)])),
            },
            span: Span::default(),
        });
        let rules = RulesExpr::Concat(vec![
            shift(0),
            RulesExpr::Sum(vec![pattern, shift(3)]),
            shift(4),
        ]);
        let ir = index_rules(&rules);
        assert_eq!(ir.action_count(), 6);
        assert!(matches!(ir.action(2).kind, IndexedActionKind::Pattern { .. }));
        assert!(matches!(ir.action(3).kind, IndexedActionKind::Shift(1)));
        assert!(matches!(ir.action(5).kind, IndexedActionKind::Shift(3)));
        assert_eq!(
            ir.root,
            IExpr::Concat(vec![
                IExpr::Action(1),
                IExpr::Sum(vec![IExpr::Action(2), IExpr::Action(5)]),
                IExpr::Action(6),
            ])
        );
    }
}
