//! The move generator and play engine.
//!
//! Legal moves are found by a depth-first search over pairs of an NFA
//! state and a board vertex, mutating the semi-state in place whenever a
//! modifier is crossed and undoing it on backtrack. Pairs already seen
//! under the current modifier prefix are skipped, which keeps the search
//! linear in states × vertices between modifiers; applying a modifier
//! opens a fresh generation and undoing it restores the previous one, so
//! the visited sets behave like a stack without ever being cleared.
//!
//! A move is the sequence of (action index, vertex) pairs of its
//! modifiers, ending with exactly one switch. Moves are reported in
//! search discovery order, which follows the textual order of the rules.

use std::collections::HashMap;

use rand::Rng;

use crate::analyzer::recommended_cap;
use crate::ast::{IndexedActionKind, VertexId};
use crate::error::EngineError;
use crate::game::Game;
use crate::nfa::Nfa;
use crate::state::{GameState, SemiState, UndoRecord};

/// A legal move: the modifier applications in order, each with the vertex
/// it happens at. The final pair is the switch that ends the move.
pub type Move = Vec<(usize, VertexId)>;

/// Undoes one applied move.
#[derive(Debug)]
pub struct MoveUndo {
    records: Vec<UndoRecord>,
    old_position: VertexId,
    old_rules_index: usize,
}

/// How many keeper moves may be applied in a row before the engine
/// assumes the rules loop without returning control to a player.
pub const KEEPER_ITERATION_LIMIT: usize = 10_000;

pub struct Reasoner<'g> {
    game: &'g Game,
    cap: usize,
    debug_keeper: bool,
    /// Generation stamps per (NFA state, vertex) for the main NFA.
    main_stamps: Vec<u64>,
    /// The same per pattern NFA, keyed by the pattern's action index.
    pattern_stamps: HashMap<usize, Vec<u64>>,
    stamp_counter: u64,
    /// Current generation of the main search; changes when a modifier on
    /// the main path is applied, and is restored when it is undone.
    cur_main: u64,
    /// Current generation of the pattern search in progress.
    cur_pattern: u64,
    /// Pattern results per (pattern index, vertex, main generation);
    /// cleared at the start of every `legal_moves` call.
    pattern_memo: HashMap<(usize, VertexId, u64), bool>,
    /// Number of pattern-internal modifiers currently applied; the memo
    /// is bypassed while this is nonzero.
    pattern_mods: usize,
}

impl<'g> Reasoner<'g> {
    /// Engine with the modifier cap recommended by the static analyzer.
    pub fn new(game: &'g Game) -> Self {
        Self::with_cap(game, recommended_cap(&game.desc))
    }

    pub fn with_cap(game: &'g Game, cap: usize) -> Self {
        let vertices = game.desc.board.vertex_count();
        let pattern_stamps = game
            .automaton
            .patterns
            .iter()
            .map(|(&idx, nfa)| (idx, vec![0; nfa.state_count * vertices]))
            .collect();
        Reasoner {
            game,
            cap,
            debug_keeper: false,
            main_stamps: vec![0; game.automaton.main.state_count * vertices],
            pattern_stamps,
            stamp_counter: 0,
            cur_main: 0,
            cur_pattern: 0,
            pattern_memo: HashMap::new(),
            pattern_mods: 0,
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// In debug mode keeper completion verifies that every keeper choice
    /// leads to the same fully completed state.
    pub fn set_debug_keeper(&mut self, on: bool) {
        self.debug_keeper = on;
    }

    /// All legal moves of the state. The state is borrowed mutably for
    /// the in-place search but is bit-identical on return.
    pub fn legal_moves(&mut self, state: &mut GameState) -> Result<Vec<Move>, EngineError> {
        self.pattern_memo.clear();
        self.stamp_counter += 1;
        self.cur_main = self.stamp_counter;
        let q = self.game.automaton.main.resume_state(state.rules_index);
        let mut moves = Vec::new();
        let mut prefix = Vec::new();
        let mut used = 0usize;
        let position = state.semi.position;
        self.dfs_main(&mut state.semi, q, position, &mut used, &mut prefix, &mut moves)?;
        debug_assert!(prefix.is_empty() && used == 0);
        Ok(moves)
    }

    fn dfs_main(
        &mut self,
        semi: &mut SemiState,
        q: usize,
        v: VertexId,
        used: &mut usize,
        prefix: &mut Vec<(usize, VertexId)>,
        moves: &mut Vec<Move>,
    ) -> Result<(), EngineError> {
        let game = self.game;
        let nfa: &Nfa = &game.automaton.main;
        let slot = q * game.desc.board.vertex_count() + v;
        if self.main_stamps[slot] == self.cur_main {
            return Ok(());
        }
        self.main_stamps[slot] = self.cur_main;

        for &(idx, tgt) in &nfa.raw_edges[q] {
            match &game.indexed.action(idx).kind {
                IndexedActionKind::Shift(d) => {
                    if let Some(v2) = game.desc.board.target(v, *d) {
                        self.dfs_main(semi, tgt, v2, used, prefix, moves)?;
                    }
                }
                IndexedActionKind::On(pieces) => {
                    if pieces.binary_search(&semi.piece_at(v)).is_ok() {
                        self.dfs_main(semi, tgt, v, used, prefix, moves)?;
                    }
                }
                IndexedActionKind::Compare(a, op, b) => {
                    if let (Some(x), Some(y)) = (semi.eval(a), semi.eval(b)) {
                        if op.holds(x, y) {
                            self.dfs_main(semi, tgt, v, used, prefix, moves)?;
                        }
                    }
                }
                IndexedActionKind::Pattern { positive, .. } => {
                    if self.eval_pattern(idx, semi, v, used)? == *positive {
                        self.dfs_main(semi, tgt, v, used, prefix, moves)?;
                    }
                }
                IndexedActionKind::Off(p) => {
                    self.charge(used)?;
                    let rec = semi.apply_off(v, *p);
                    let saved = self.open_main_generation();
                    prefix.push((idx, v));
                    let r = self.dfs_main(semi, tgt, v, used, prefix, moves);
                    prefix.pop();
                    self.cur_main = saved;
                    semi.undo(rec);
                    *used -= 1;
                    r?;
                }
                IndexedActionKind::Assign(var, expr) => {
                    let Some(value) = semi.eval(expr) else { continue };
                    let Some(rec) = semi.apply_assign(&game.desc, *var, value) else {
                        continue;
                    };
                    self.charge(used).map_err(|e| {
                        semi.undo(rec);
                        e
                    })?;
                    let saved = self.open_main_generation();
                    prefix.push((idx, v));
                    let r = self.dfs_main(semi, tgt, v, used, prefix, moves);
                    prefix.pop();
                    self.cur_main = saved;
                    semi.undo(rec);
                    *used -= 1;
                    r?;
                }
                IndexedActionKind::Switch(_) | IndexedActionKind::SwitchKeeper => {
                    let mut mv = prefix.clone();
                    mv.push((idx, v));
                    moves.push(mv);
                }
            }
        }
        for i in 0..nfa.eps[q].len() {
            let n = nfa.eps[q][i];
            self.dfs_main(semi, n, v, used, prefix, moves)?;
        }
        Ok(())
    }

    fn charge(&self, used: &mut usize) -> Result<(), EngineError> {
        if *used >= self.cap {
            return Err(EngineError::StraightnessCapExceeded(self.cap));
        }
        *used += 1;
        Ok(())
    }

    fn open_main_generation(&mut self) -> u64 {
        let saved = self.cur_main;
        self.stamp_counter += 1;
        self.cur_main = self.stamp_counter;
        saved
    }

    /// Whether the pattern's body matches starting at `v`, leaving the
    /// semi-state untouched.
    fn eval_pattern(
        &mut self,
        pattern_idx: usize,
        semi: &mut SemiState,
        v: VertexId,
        used: &mut usize,
    ) -> Result<bool, EngineError> {
        let memo_key = (pattern_idx, v, self.cur_main);
        if self.pattern_mods == 0 {
            if let Some(&hit) = self.pattern_memo.get(&memo_key) {
                return Ok(hit);
            }
        }
        let saved = self.cur_pattern;
        self.stamp_counter += 1;
        self.cur_pattern = self.stamp_counter;
        let start = self.game.automaton.patterns[&pattern_idx].start;
        let mut found = false;
        let r = self.dfs_pattern(pattern_idx, semi, start, v, used, &mut found);
        self.cur_pattern = saved;
        r?;
        if self.pattern_mods == 0 {
            self.pattern_memo.insert(memo_key, found);
        }
        Ok(found)
    }

    fn dfs_pattern(
        &mut self,
        pidx: usize,
        semi: &mut SemiState,
        q: usize,
        v: VertexId,
        used: &mut usize,
        found: &mut bool,
    ) -> Result<(), EngineError> {
        if *found {
            return Ok(());
        }
        let game = self.game;
        let nfa: &Nfa = &game.automaton.patterns[&pidx];
        if q == nfa.accept {
            *found = true;
            return Ok(());
        }
        let slot = q * game.desc.board.vertex_count() + v;
        {
            let stamps = self.pattern_stamps.get_mut(&pidx).unwrap();
            if stamps[slot] == self.cur_pattern {
                return Ok(());
            }
            stamps[slot] = self.cur_pattern;
        }

        for &(idx, tgt) in &nfa.raw_edges[q] {
            match &game.indexed.action(idx).kind {
                IndexedActionKind::Shift(d) => {
                    if let Some(v2) = game.desc.board.target(v, *d) {
                        self.dfs_pattern(pidx, semi, tgt, v2, used, found)?;
                    }
                }
                IndexedActionKind::On(pieces) => {
                    if pieces.binary_search(&semi.piece_at(v)).is_ok() {
                        self.dfs_pattern(pidx, semi, tgt, v, used, found)?;
                    }
                }
                IndexedActionKind::Compare(a, op, b) => {
                    if let (Some(x), Some(y)) = (semi.eval(a), semi.eval(b)) {
                        if op.holds(x, y) {
                            self.dfs_pattern(pidx, semi, tgt, v, used, found)?;
                        }
                    }
                }
                IndexedActionKind::Pattern { positive, .. } => {
                    if self.eval_pattern(idx, semi, v, used)? == *positive {
                        self.dfs_pattern(pidx, semi, tgt, v, used, found)?;
                    }
                }
                IndexedActionKind::Off(p) => {
                    self.charge(used)?;
                    let rec = semi.apply_off(v, *p);
                    self.pattern_mods += 1;
                    let saved = self.cur_pattern;
                    self.stamp_counter += 1;
                    self.cur_pattern = self.stamp_counter;
                    let r = self.dfs_pattern(pidx, semi, tgt, v, used, found);
                    self.cur_pattern = saved;
                    self.pattern_mods -= 1;
                    semi.undo(rec);
                    *used -= 1;
                    r?;
                }
                IndexedActionKind::Assign(var, expr) => {
                    let Some(value) = semi.eval(expr) else { continue };
                    let Some(rec) = semi.apply_assign(&game.desc, *var, value) else {
                        continue;
                    };
                    self.charge(used).map_err(|e| {
                        semi.undo(rec);
                        e
                    })?;
                    self.pattern_mods += 1;
                    let saved = self.cur_pattern;
                    self.stamp_counter += 1;
                    self.cur_pattern = self.stamp_counter;
                    let r = self.dfs_pattern(pidx, semi, tgt, v, used, found);
                    self.cur_pattern = saved;
                    self.pattern_mods -= 1;
                    semi.undo(rec);
                    *used -= 1;
                    r?;
                }
                // Patterns are switch-free; a switch slipping through
                // static validation never matches.
                IndexedActionKind::Switch(_) | IndexedActionKind::SwitchKeeper => {}
            }
            if *found {
                return Ok(());
            }
        }
        for i in 0..nfa.eps[q].len() {
            let n = nfa.eps[q][i];
            self.dfs_pattern(pidx, semi, n, v, used, found)?;
            if *found {
                return Ok(());
            }
        }
        Ok(())
    }

    /// Replays a move: for each pair, jump to the vertex and apply the
    /// modifier; the final pair must be the move's only switch and sets
    /// the rules index.
    pub fn apply_move(
        &mut self,
        state: &mut GameState,
        mv: &Move,
    ) -> Result<MoveUndo, EngineError> {
        let game = self.game;
        let Some(((last_idx, _), body)) = mv.split_last() else {
            return Err(EngineError::IllegalMove);
        };
        let valid_idx = |i: usize| i >= 1 && i <= game.indexed.action_count();
        if !valid_idx(*last_idx) || !game.indexed.action(*last_idx).is_switch() {
            return Err(EngineError::IllegalMove);
        }
        let mut undo = MoveUndo {
            records: Vec::with_capacity(mv.len()),
            old_position: state.semi.position,
            old_rules_index: state.rules_index,
        };
        let fail = |state: &mut GameState, mut undo: MoveUndo| {
            while let Some(rec) = undo.records.pop() {
                state.semi.undo(rec);
            }
            state.semi.position = undo.old_position;
            Err(EngineError::IllegalMove)
        };
        for &(idx, v) in body {
            if !valid_idx(idx) || v >= game.desc.board.vertex_count() {
                return fail(state, undo);
            }
            let action = game.indexed.action(idx);
            if action.is_switch() {
                return fail(state, undo); // exactly one switch, at the end
            }
            state.semi.position = v;
            match &action.kind {
                IndexedActionKind::Off(p) => {
                    undo.records.push(state.semi.apply_off(v, *p));
                }
                IndexedActionKind::Assign(var, expr) => {
                    let applied = state
                        .semi
                        .eval(expr)
                        .and_then(|value| state.semi.apply_assign(&game.desc, *var, value));
                    match applied {
                        Some(rec) => undo.records.push(rec),
                        None => return fail(state, undo),
                    }
                }
                _ => return fail(state, undo), // only modifiers are recorded
            }
        }
        let (last_idx, last_v) = *mv.last().unwrap();
        if last_v >= game.desc.board.vertex_count() {
            return fail(state, undo);
        }
        state.semi.position = last_v;
        let player = match &game.indexed.action(last_idx).kind {
            IndexedActionKind::Switch(p) => Some(*p),
            _ => None,
        };
        undo.records.push(state.semi.apply_switch(player));
        state.rules_index = last_idx;
        Ok(undo)
    }

    pub fn undo_move(&mut self, state: &mut GameState, mut undo: MoveUndo) {
        while let Some(rec) = undo.records.pop() {
            state.semi.undo(rec);
        }
        state.semi.position = undo.old_position;
        state.rules_index = undo.old_rules_index;
    }

    /// Applies keeper moves until a player has control or the keeper is
    /// stuck. Returns the undos, newest last.
    pub fn complete_keeper(
        &mut self,
        state: &mut GameState,
    ) -> Result<Vec<MoveUndo>, EngineError> {
        let debug = self.debug_keeper;
        self.complete_inner(state, debug)
    }

    fn complete_inner(
        &mut self,
        state: &mut GameState,
        debug: bool,
    ) -> Result<Vec<MoveUndo>, EngineError> {
        let mut undos = Vec::new();
        let mut result = Ok(());
        while state.semi.current_player.is_none() {
            if undos.len() >= KEEPER_ITERATION_LIMIT {
                result = Err(EngineError::KeeperRunaway(KEEPER_ITERATION_LIMIT));
                break;
            }
            let moves = match self.legal_moves(state) {
                Ok(m) => m,
                Err(e) => {
                    result = Err(e);
                    break;
                }
            };
            let Some(first) = moves.first() else { break };
            if debug && moves.len() > 1 {
                if let Err(e) = self.check_keeper_determinism(state, &moves) {
                    result = Err(e);
                    break;
                }
            }
            let first = first.clone();
            match self.apply_move(state, &first) {
                Ok(u) => undos.push(u),
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        match result {
            Ok(()) => Ok(undos),
            Err(e) => {
                self.undo_completion(state, undos);
                Err(e)
            }
        }
    }

    fn check_keeper_determinism(
        &mut self,
        state: &GameState,
        moves: &[Move],
    ) -> Result<(), EngineError> {
        let mut reference: Option<GameState> = None;
        for mv in moves {
            let mut probe = state.clone();
            self.apply_move(&mut probe, mv)?;
            self.complete_inner(&mut probe, false)?;
            match &reference {
                None => reference = Some(probe),
                Some(r) if *r != probe => return Err(EngineError::KeeperNondeterminism),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn undo_completion(&mut self, state: &mut GameState, mut undos: Vec<MoveUndo>) {
        while let Some(u) = undos.pop() {
            self.undo_move(state, u);
        }
    }

    /// Whether the position (after keeper completion) has no legal moves.
    pub fn is_terminal(&mut self, state: &mut GameState) -> Result<bool, EngineError> {
        Ok(self.legal_moves(state)?.is_empty())
    }

    /// Number of move sequences of exactly `depth` player moves; keeper
    /// moves are completed automatically and not counted.
    pub fn perft(&mut self, state: &mut GameState, depth: u32) -> Result<u64, EngineError> {
        let undos = self.complete_keeper(state)?;
        let result = self.perft_completed(state, depth);
        self.undo_completion(state, undos);
        result
    }

    fn perft_completed(
        &mut self,
        state: &mut GameState,
        depth: u32,
    ) -> Result<u64, EngineError> {
        if depth == 0 {
            return Ok(1);
        }
        let moves = self.legal_moves(state)?;
        if depth == 1 {
            return Ok(moves.len() as u64);
        }
        let mut total = 0u64;
        for mv in &moves {
            let u = self.apply_move(state, mv)?;
            let r = self.perft(state, depth - 1);
            self.undo_move(state, u);
            total += r?;
        }
        Ok(total)
    }

    /// Plays uniformly random moves until the game ends or `max_plies`
    /// player moves were made. The state is left at the end of the
    /// playout.
    pub fn random_playout<R: Rng>(
        &mut self,
        state: &mut GameState,
        rng: &mut R,
        max_plies: usize,
    ) -> Result<PlayoutEnd, EngineError> {
        let mut plies = 0;
        loop {
            self.complete_keeper(state)?;
            let moves = self.legal_moves(state)?;
            if moves.is_empty() || plies >= max_plies {
                let scores = state
                    .semi
                    .scores(&self.game.desc)
                    .into_iter()
                    .map(|(name, s)| (name.to_string(), s))
                    .collect();
                return Ok(PlayoutEnd { plies, truncated: !moves.is_empty(), scores });
            }
            let mv = &moves[rng.gen_range(0..moves.len())];
            self.apply_move(state, &mv.clone())?;
            plies += 1;
        }
    }
}

/// Outcome of a random playout.
#[derive(Debug, Clone)]
pub struct PlayoutEnd {
    pub plies: usize,
    /// True if the ply limit was hit before the game ended.
    pub truncated: bool,
    pub scores: Vec<(String, i64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::EngineError;

    fn game(src: &str) -> Game {
        Game::compile(src).unwrap()
    }

    fn two_cell(rules: &str) -> Game {
        game(&format!(
            "#players = p(10), q(10)
             #pieces = e, x
             #variables =
             #board = a [e] {{r: b}} b [e] {{l: a}}
             #rules = {rules}"
        ))
    }

    #[test]
    fn keeper_opens_then_player_chooses() {
        let g = two_cell("->p ([x] ->q + r [x] ->q)");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();

        let keeper_moves = r.legal_moves(&mut s).unwrap();
        assert_eq!(keeper_moves.len(), 1); // the opening switch
        r.complete_keeper(&mut s).unwrap();
        assert_eq!(s.semi.current_player, Some(0));

        let moves = r.legal_moves(&mut s).unwrap();
        // Textual order: place at a, then shift right and place at b.
        assert_eq!(moves.len(), 2);
        assert_eq!(moves[0].last().unwrap().1, 0);
        assert_eq!(moves[1].last().unwrap().1, 1);
    }

    #[test]
    fn legal_moves_leaves_state_untouched() {
        let g = two_cell("->p (r l)* ([x] ->q + [$p = p + 1] ->q)");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        let before = s.clone();
        r.legal_moves(&mut s).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn star_cycle_terminates_and_dedups() {
        // The cycle can be walked any number of times but there is only
        // one resulting move.
        let g = two_cell("->p (r l)* [x] ->q");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        let moves = r.legal_moves(&mut s).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].first().unwrap().1, 0);
    }

    #[test]
    fn star_exit_at_each_vertex() {
        let g = two_cell("->p r* [x] ->q");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        let moves = r.legal_moves(&mut s).unwrap();
        let places: Vec<VertexId> = moves.iter().map(|m| m[0].1).collect();
        let mut sorted = places.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1]);
    }

    #[test]
    fn apply_and_undo_round_trip() {
        let g = two_cell("->p r [x] [$q = 3] ->q l [e] ->p");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        let initial = s.clone();

        let moves = r.legal_moves(&mut s).unwrap();
        assert_eq!(moves.len(), 1);
        let u = r.apply_move(&mut s, &moves[0]).unwrap();
        assert_eq!(s.semi.current_player, Some(1));
        assert_eq!(s.semi.piece_at(1), 1);
        assert_eq!(s.semi.variables[1], 3);
        assert_eq!(s.semi.position, 1);

        r.undo_move(&mut s, u);
        assert_eq!(s, initial);
    }

    #[test]
    fn malformed_moves_are_rejected_and_rolled_back() {
        let g = two_cell("->p [x] ->q");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        let before = s.clone();

        // Empty, no trailing switch, switch in the middle.
        for mv in [
            vec![],
            vec![(2, 0)],          // the off alone
            vec![(3, 0), (2, 0)],  // switch first
        ] {
            assert!(matches!(
                r.apply_move(&mut s, &mv),
                Err(EngineError::IllegalMove)
            ));
            assert_eq!(s, before);
        }
    }

    #[test]
    fn modifier_loop_hits_the_cap() {
        let g = two_cell("->p ([x] [e])* ->q");
        let mut r = Reasoner::with_cap(&g, 8);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        assert!(matches!(
            r.legal_moves(&mut s),
            Err(EngineError::StraightnessCapExceeded(8))
        ));
    }

    #[test]
    fn pattern_checks_do_not_change_state() {
        // Positive look: x is placeable only where the right neighbour
        // holds e; the probe off inside the pattern must not persist.
        let g = two_cell("->p {? r {e} [x]} [x] ->q");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        let before = s.clone();
        let moves = r.legal_moves(&mut s).unwrap();
        assert_eq!(s, before);
        assert_eq!(moves.len(), 1);
    }

    #[test]
    fn negative_pattern_blocks() {
        // {! r} never fails at a (it has an r edge), so no move.
        let g = two_cell("->p {! r} [x] ->q");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        assert!(r.legal_moves(&mut s).unwrap().is_empty());

        // From b there is no r edge, so {! r} holds there.
        let g2 = two_cell("->p r {! r} [x] ->q");
        let mut r2 = Reasoner::new(&g2);
        let mut s2 = g2.initial_state();
        r2.complete_keeper(&mut s2).unwrap();
        let moves = r2.legal_moves(&mut s2).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0][0].1, 1);
    }

    #[test]
    fn empty_on_set_is_never_valid() {
        let g = two_cell("->p {} [x] ->q");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        assert!(r.legal_moves(&mut s).unwrap().is_empty());
    }

    #[test]
    fn keeper_runaway_is_detected() {
        // The keeper keeps switching to itself forever.
        let g = two_cell("(->>)*");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        assert!(matches!(
            r.complete_keeper(&mut s),
            Err(EngineError::KeeperRunaway(_))
        ));
        // The state is rolled back on failure.
        assert_eq!(s, g.initial_state());
    }

    #[test]
    fn debug_keeper_flags_real_nondeterminism() {
        let g = two_cell("([x] ->p + ->p)");
        let mut r = Reasoner::new(&g);
        r.set_debug_keeper(true);
        let mut s = g.initial_state();
        assert!(matches!(
            r.complete_keeper(&mut s),
            Err(EngineError::KeeperNondeterminism)
        ));
    }

    #[test]
    fn debug_keeper_accepts_confluent_choices() {
        // Both keeper moves end with the same switch, position, and
        // state: p is already 0, and off x then off e restores the board.
        let g = two_cell("([$p = 0] + [x] [e]) ->p");
        let mut r = Reasoner::new(&g);
        r.set_debug_keeper(true);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        assert_eq!(s.semi.current_player, Some(0));
    }

    #[test]
    fn perft_counts_alternating_plies() {
        // Each side has exactly two placements per turn, forever.
        let g = two_cell("->p (([x] + [e]) ->q ([x] + [e]) ->p)*");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        assert_eq!(r.perft(&mut s, 1).unwrap(), 2);
        assert_eq!(r.perft(&mut s, 2).unwrap(), 4);
        assert_eq!(r.perft(&mut s, 5).unwrap(), 32);
        assert_eq!(s, g.initial_state());
    }

    #[test]
    fn perft_zero_depth_is_one_and_terminal_prunes() {
        let g = two_cell("->p [x] ->q");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        assert_eq!(r.perft(&mut s, 0).unwrap(), 1);
        assert_eq!(r.perft(&mut s, 1).unwrap(), 1);
        // q has no continuation: depth 2 finds no second ply.
        assert_eq!(r.perft(&mut s, 2).unwrap(), 0);
    }

    #[test]
    fn random_playout_reports_scores() {
        let g = two_cell(
            "->p (([x] + [e]) [$p = 10] [$q = 0] ->q \
                  ([x] + [e]) [$q = 10] [$p = 0] ->p)*",
        );
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        let mut rng = rand::rngs::mock::StepRng::new(0, 1);
        let end = r.random_playout(&mut s, &mut rng, 5).unwrap();
        assert!(end.truncated);
        assert_eq!(end.plies, 5);
        assert_eq!(end.scores.len(), 2);
    }

    #[test]
    fn comparison_gates_on_variables() {
        let g = two_cell("->p [$p = 4] {$ p * 2 >= 8} [x] ->q");
        let mut r = Reasoner::new(&g);
        let mut s = g.initial_state();
        r.complete_keeper(&mut s).unwrap();
        assert_eq!(r.legal_moves(&mut s).unwrap().len(), 1);

        let g2 = two_cell("->p [$p = 3] {$ p * 2 >= 8} [x] ->q");
        let mut r2 = Reasoner::new(&g2);
        let mut s2 = g2.initial_state();
        r2.complete_keeper(&mut s2).unwrap();
        assert!(r2.legal_moves(&mut s2).unwrap().is_empty());
    }
}
