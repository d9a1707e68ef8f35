//! Game state: the semi-state (player, piece assignment, variables,
//! position) plus primitives for applying and undoing modifiers.
//!
//! Arithmetic is evaluated with an i128 accumulator; overflow and division
//! by zero make the surrounding action invalid rather than aborting.

use crate::ast::{
    AbstractDescription, ArithExpr, PieceId, PlayerId, VarId, VertexId,
};

/// Everything that changes during a play, except the rules index.
/// `current_player == None` means the keeper has control.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemiState {
    pub current_player: Option<PlayerId>,
    /// Piece per vertex.
    pub pieces: Vec<PieceId>,
    /// Combined variable space: players first, then declared variables.
    pub variables: Vec<i64>,
    pub position: VertexId,
    /// Number of vertices holding each piece, kept in sync with `pieces`.
    pub piece_counts: Vec<u32>,
}

/// A semi-state with the rules index: all information that may change.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub semi: SemiState,
    pub rules_index: usize,
}

/// Reverses one modifier application.
#[derive(Debug, Clone, Copy)]
pub enum UndoRecord {
    Off { vertex: VertexId, old_piece: PieceId },
    Assign { var: VarId, old_value: i64 },
    Switch { old_player: Option<PlayerId> },
}

impl SemiState {
    /// The initial semi-state: pieces from the board, variables 0, the
    /// keeper to move, position at the first board vertex.
    pub fn initial(desc: &AbstractDescription) -> Self {
        let mut piece_counts = vec![0u32; desc.pieces.len()];
        for &p in &desc.board.initial_pieces {
            piece_counts[p] += 1;
        }
        SemiState {
            current_player: None,
            pieces: desc.board.initial_pieces.clone(),
            variables: vec![0; desc.var_count()],
            position: 0,
            piece_counts,
        }
    }

    pub fn piece_at(&self, v: VertexId) -> PieceId {
        self.pieces[v]
    }

    /// Evaluates an expression; `None` on overflow or division by zero.
    pub fn eval(&self, expr: &ArithExpr) -> Option<i64> {
        self.eval_wide(expr)?.try_into().ok()
    }

    fn eval_wide(&self, expr: &ArithExpr) -> Option<i128> {
        Some(match expr {
            ArithExpr::Const(n) => *n as i128,
            ArithExpr::Var(v) => self.variables[*v] as i128,
            ArithExpr::PieceCount(p) => self.piece_counts[*p] as i128,
            ArithExpr::Add(a, b) => self.eval_wide(a)?.checked_add(self.eval_wide(b)?)?,
            ArithExpr::Sub(a, b) => self.eval_wide(a)?.checked_sub(self.eval_wide(b)?)?,
            ArithExpr::Mul(a, b) => self.eval_wide(a)?.checked_mul(self.eval_wide(b)?)?,
            ArithExpr::Div(a, b) => {
                let d = self.eval_wide(b)?;
                if d == 0 {
                    return None;
                }
                self.eval_wide(a)?.checked_div(d)?
            }
        })
    }

    /// Replaces the piece at `vertex`. Always valid.
    pub fn apply_off(&mut self, vertex: VertexId, piece: PieceId) -> UndoRecord {
        let old_piece = self.pieces[vertex];
        self.piece_counts[old_piece] -= 1;
        self.piece_counts[piece] += 1;
        self.pieces[vertex] = piece;
        UndoRecord::Off { vertex, old_piece }
    }

    /// Assigns `value` to `var` if it is within 0..=bound.
    pub fn apply_assign(
        &mut self,
        desc: &AbstractDescription,
        var: VarId,
        value: i64,
    ) -> Option<UndoRecord> {
        if value < 0 || value as u64 > desc.var_bound(var) {
            return None;
        }
        let old_value = self.variables[var];
        self.variables[var] = value;
        Some(UndoRecord::Assign { var, old_value })
    }

    /// Gives control to a player (`Some`) or the keeper (`None`).
    pub fn apply_switch(&mut self, player: Option<PlayerId>) -> UndoRecord {
        let old_player = self.current_player;
        self.current_player = player;
        UndoRecord::Switch { old_player }
    }

    pub fn undo(&mut self, rec: UndoRecord) {
        match rec {
            UndoRecord::Off { vertex, old_piece } => {
                let cur = self.pieces[vertex];
                self.piece_counts[cur] -= 1;
                self.piece_counts[old_piece] += 1;
                self.pieces[vertex] = old_piece;
            }
            UndoRecord::Assign { var, old_value } => self.variables[var] = old_value,
            UndoRecord::Switch { old_player } => self.current_player = old_player,
        }
    }

    /// Current scores: the values of the player variables.
    pub fn scores<'a>(&self, desc: &'a AbstractDescription) -> Vec<(&'a str, i64)> {
        (0..desc.players.len())
            .map(|p| (desc.player_name(p), self.variables[p]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ActionKind;
    use crate::lexer::tokenize;
    use crate::parser::parse_description;

    fn knight_game() -> AbstractDescription {
        // A 3×3 board with a white knight at the centre-right, mirroring
        // the classic knight-move action sequence.
        let src = "
            #players = white(1), black(1)
            #pieces = empty, wKnight
            #variables =
            #board =
                v11 [empty] {up: v12, right: v21}
                v21 [empty] {up: v22, right: v31, left: v11}
                v31 [empty] {up: v32, left: v21}
                v12 [empty] {up: v13, right: v22, down: v11}
                v22 [empty] {up: v23, right: v32, left: v12, down: v21}
                v32 [empty] {up: v33, left: v22, down: v31}
                v13 [empty] {right: v23, down: v12}
                v23 [empty] {right: v33, left: v13, down: v22}
                v33 [wKnight] {left: v23, down: v32}
            #rules = {wKnight} [empty] left up up {empty} [wKnight] ->black
        ";
        parse_description(&tokenize(src).unwrap()).unwrap()
    }

    #[test]
    fn knight_sequence_applies_and_undoes() {
        let desc = knight_game();
        let mut s = SemiState::initial(&desc);
        // Relocate the knight to v31 for this position.
        let v33 = desc.board.vertex_id("v33").unwrap();
        let start = desc.board.vertex_id("v31").unwrap();
        s.apply_off(v33, 0);
        s.apply_off(start, 1);
        s.position = start;

        // Walk the sequence by hand: {wKnight} [empty] left up up {empty} [wKnight].
        assert_eq!(s.piece_at(s.position), 1);
        let u1 = s.apply_off(s.position, 0);
        let left = desc.board.dirs.iter().position(|d| d == "left").unwrap();
        let up = desc.board.dirs.iter().position(|d| d == "up").unwrap();
        s.position = desc.board.target(s.position, left).unwrap();
        s.position = desc.board.target(s.position, up).unwrap();
        s.position = desc.board.target(s.position, up).unwrap();
        assert_eq!(desc.board.vertex_names[s.position], "v23");
        assert_eq!(s.piece_at(s.position), 0);
        let u2 = s.apply_off(s.position, 1);
        let u3 = s.apply_switch(Some(1));
        assert_eq!(s.current_player, Some(1));
        assert_eq!(s.piece_counts, vec![8, 1]);

        s.undo(u3);
        s.undo(u2);
        s.position = start;
        s.undo(u1);
        assert_eq!(s.piece_at(start), 1);
        assert_eq!(s.current_player, None);
    }

    #[test]
    fn initial_state_contract() {
        let desc = knight_game();
        let s = SemiState::initial(&desc);
        assert_eq!(s.current_player, None);
        assert_eq!(s.position, 0);
        assert!(s.variables.iter().all(|&v| v == 0));
        assert_eq!(s.piece_counts, vec![8, 1]);
    }

    #[test]
    fn assignment_respects_bounds() {
        let desc = knight_game();
        let mut s = SemiState::initial(&desc);
        assert!(s.apply_assign(&desc, 0, 1).is_some());
        assert!(s.apply_assign(&desc, 0, 2).is_none());
        assert!(s.apply_assign(&desc, 0, -1).is_none());
        assert_eq!(s.variables[0], 1);
    }

    #[test]
    fn arithmetic_division_truncates_and_div_zero_fails() {
        let desc = knight_game();
        let s = SemiState::initial(&desc);
        let seven_div_two = ArithExpr::Div(
            Box::new(ArithExpr::Const(7)),
            Box::new(ArithExpr::Const(2)),
        );
        assert_eq!(s.eval(&seven_div_two), Some(3));
        let div_zero = ArithExpr::Div(
            Box::new(ArithExpr::Const(1)),
            Box::new(ArithExpr::Const(0)),
        );
        assert_eq!(s.eval(&div_zero), None);
    }

    #[test]
    fn overflow_is_invalid_not_fatal() {
        let desc = knight_game();
        let s = SemiState::initial(&desc);
        let big = ArithExpr::Mul(
            Box::new(ArithExpr::Const(i64::MAX)),
            Box::new(ArithExpr::Const(i64::MAX)),
        );
        assert_eq!(s.eval(&big), None); // exceeds i64 after i128 multiply
    }

    #[test]
    fn piece_counts_track_offs() {
        let desc = knight_game();
        let mut s = SemiState::initial(&desc);
        let r = s.apply_off(0, 1);
        assert_eq!(s.piece_counts, vec![7, 2]);
        s.undo(r);
        assert_eq!(s.piece_counts, vec![8, 1]);
    }

    #[test]
    fn rules_parse_matches_expected_shape() {
        let desc = knight_game();
        let crate::ast::RulesExpr::Concat(items) = &desc.rules else { panic!() };
        assert_eq!(items.len(), 8);
        let crate::ast::RulesExpr::Action(last) = items.last().unwrap() else { panic!() };
        assert!(matches!(last.kind, ActionKind::Switch(1)));
    }
}
