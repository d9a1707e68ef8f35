//! An independent reference implementation used to cross-check the
//! engine.
//!
//! Instead of an automaton it works directly on regular-expression terms
//! with Brzozowski derivatives, and instead of in-place mutation with
//! undo it clones the semi-state at every modifier. It shares only the
//! single-action semantics in [`crate::state`]; the search machinery has
//! nothing in common with [`crate::reasoner`], which is the point.

use std::collections::{BTreeSet, HashSet};

use crate::ast::{IExpr, IndexedActionKind, VertexId};
use crate::error::EngineError;
use crate::game::Game;
use crate::reasoner::{Move, KEEPER_ITERATION_LIMIT};
use crate::state::{GameState, SemiState};

/// A regular-expression term over action indices, kept in a normal form
/// (flattened, deduplicated sums; flattened products; collapsed stars) so
/// that the set of derivatives of any term is finite.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Empty,
    Eps,
    Act(usize),
    Sum(BTreeSet<Term>),
    Cat(Vec<Term>),
    Star(Box<Term>),
}

pub fn sum(items: impl IntoIterator<Item = Term>) -> Term {
    let mut set = BTreeSet::new();
    for t in items {
        match t {
            Term::Empty => {}
            Term::Sum(inner) => set.extend(inner),
            other => {
                set.insert(other);
            }
        }
    }
    match set.len() {
        0 => Term::Empty,
        1 => set.into_iter().next().unwrap(),
        _ => Term::Sum(set),
    }
}

pub fn cat(items: impl IntoIterator<Item = Term>) -> Term {
    let mut seq = Vec::new();
    for t in items {
        match t {
            Term::Eps => {}
            Term::Empty => return Term::Empty,
            Term::Cat(inner) => seq.extend(inner),
            other => seq.push(other),
        }
    }
    match seq.len() {
        0 => Term::Eps,
        1 => seq.pop().unwrap(),
        _ => Term::Cat(seq),
    }
}

pub fn star(t: Term) -> Term {
    match t {
        Term::Empty | Term::Eps => Term::Eps,
        s @ Term::Star(_) => s,
        other => Term::Star(Box::new(other)),
    }
}

pub fn term_of(expr: &IExpr) -> Term {
    match expr {
        IExpr::Action(i) => Term::Act(*i),
        IExpr::Sum(items) => sum(items.iter().map(term_of)),
        IExpr::Concat(items) => cat(items.iter().map(term_of)),
        IExpr::Star(inner) => star(term_of(inner)),
    }
}

pub fn nullable(t: &Term) -> bool {
    match t {
        Term::Empty | Term::Act(_) => false,
        Term::Eps | Term::Star(_) => true,
        Term::Sum(items) => items.iter().any(nullable),
        Term::Cat(items) => items.iter().all(nullable),
    }
}

/// The Brzozowski derivative: the language of suffixes after symbol `a`.
pub fn deriv(t: &Term, a: usize) -> Term {
    match t {
        Term::Empty | Term::Eps => Term::Empty,
        Term::Act(i) => {
            if *i == a {
                Term::Eps
            } else {
                Term::Empty
            }
        }
        Term::Sum(items) => sum(items.iter().map(|s| deriv(s, a))),
        Term::Cat(items) => {
            // d(xy) = d(x)y  (+ d(y) when x is nullable), generalised.
            let mut alts = Vec::new();
            for (k, item) in items.iter().enumerate() {
                let mut parts = vec![deriv(item, a)];
                parts.extend(items[k + 1..].iter().cloned());
                alts.push(cat(parts));
                if !nullable(item) {
                    break;
                }
            }
            sum(alts)
        }
        Term::Star(inner) => cat([deriv(inner, a), Term::Star(inner.clone())]),
    }
}

/// Symbols with a nonempty derivative.
pub fn first_set(t: &Term) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    collect_first(t, &mut out);
    out
}

fn collect_first(t: &Term, out: &mut BTreeSet<usize>) {
    match t {
        Term::Empty | Term::Eps => {}
        Term::Act(i) => {
            out.insert(*i);
        }
        Term::Sum(items) => items.iter().for_each(|s| collect_first(s, out)),
        Term::Cat(items) => {
            for item in items {
                collect_first(item, out);
                if !nullable(item) {
                    break;
                }
            }
        }
        Term::Star(inner) => collect_first(inner, out),
    }
}

/// Whether the word of action indices is in the language of `t`.
pub fn word_in(t: &Term, word: &[usize]) -> bool {
    let mut cur = t.clone();
    for &a in word {
        cur = deriv(&cur, a);
        if cur == Term::Empty {
            return false;
        }
    }
    nullable(&cur)
}

/// The language of suffixes after performing the action occurrence
/// `idx`, as a term. `None` if `idx` does not occur in the tree (for
/// example, inside a move-check body).
pub fn continuation_term(expr: &IExpr, idx: usize) -> Option<Term> {
    match expr {
        IExpr::Action(i) => (*i == idx).then_some(Term::Eps),
        IExpr::Sum(items) => items.iter().find_map(|e| continuation_term(e, idx)),
        IExpr::Concat(items) => {
            for (k, item) in items.iter().enumerate() {
                if let Some(c) = continuation_term(item, idx) {
                    let mut parts = vec![c];
                    parts.extend(items[k + 1..].iter().map(term_of));
                    return Some(cat(parts));
                }
            }
            None
        }
        IExpr::Star(inner) => continuation_term(inner, idx)
            .map(|c| cat([c, star(term_of(inner))])),
    }
}

/// All legal moves by derivative search, as a set.
pub fn legal_moves(
    game: &Game,
    state: &GameState,
    cap: usize,
) -> Result<BTreeSet<Move>, EngineError> {
    let term = if state.rules_index == 0 {
        term_of(&game.indexed.root)
    } else {
        continuation_term(&game.indexed.root, state.rules_index)
            .expect("rules index must occur in the rules")
    };
    let mut moves = BTreeSet::new();
    let mut prefix = Vec::new();
    search(
        game,
        &term,
        &state.semi,
        state.semi.position,
        0,
        cap,
        &mut prefix,
        &mut moves,
        &mut HashSet::new(),
    )?;
    Ok(moves)
}

#[allow(clippy::too_many_arguments)]
fn search(
    game: &Game,
    term: &Term,
    semi: &SemiState,
    v: VertexId,
    used: usize,
    cap: usize,
    prefix: &mut Vec<(usize, VertexId)>,
    moves: &mut BTreeSet<Move>,
    visited: &mut HashSet<(Term, VertexId)>,
) -> Result<(), EngineError> {
    if !visited.insert((term.clone(), v)) {
        return Ok(());
    }
    for a in first_set(term) {
        let next = deriv(term, a);
        match &game.indexed.action(a).kind {
            IndexedActionKind::Shift(d) => {
                if let Some(v2) = game.desc.board.target(v, *d) {
                    search(game, &next, semi, v2, used, cap, prefix, moves, visited)?;
                }
            }
            IndexedActionKind::On(pieces) => {
                if pieces.contains(&semi.piece_at(v)) {
                    search(game, &next, semi, v, used, cap, prefix, moves, visited)?;
                }
            }
            IndexedActionKind::Compare(x, op, y) => {
                if let (Some(xv), Some(yv)) = (semi.eval(x), semi.eval(y)) {
                    if op.holds(xv, yv) {
                        search(game, &next, semi, v, used, cap, prefix, moves, visited)?;
                    }
                }
            }
            IndexedActionKind::Pattern { positive, body } => {
                let body_term = term_of(body);
                if matches(game, &body_term, semi, v, used, cap, &mut HashSet::new())?
                    == *positive
                {
                    search(game, &next, semi, v, used, cap, prefix, moves, visited)?;
                }
            }
            IndexedActionKind::Off(p) => {
                if used >= cap {
                    return Err(EngineError::StraightnessCapExceeded(cap));
                }
                let mut s2 = semi.clone();
                s2.apply_off(v, *p);
                prefix.push((a, v));
                search(game, &next, &s2, v, used + 1, cap, prefix, moves, &mut HashSet::new())?;
                prefix.pop();
            }
            IndexedActionKind::Assign(var, expr) => {
                let mut s2 = semi.clone();
                let applied = s2
                    .eval(expr)
                    .and_then(|value| s2.apply_assign(&game.desc, *var, value));
                if applied.is_some() {
                    if used >= cap {
                        return Err(EngineError::StraightnessCapExceeded(cap));
                    }
                    prefix.push((a, v));
                    search(game, &next, &s2, v, used + 1, cap, prefix, moves, &mut HashSet::new())?;
                    prefix.pop();
                }
            }
            IndexedActionKind::Switch(_) | IndexedActionKind::SwitchKeeper => {
                let mut mv = prefix.clone();
                mv.push((a, v));
                moves.insert(mv);
            }
        }
    }
    Ok(())
}

/// Whether a move-check body matches starting at `v`.
fn matches(
    game: &Game,
    term: &Term,
    semi: &SemiState,
    v: VertexId,
    used: usize,
    cap: usize,
    visited: &mut HashSet<(Term, VertexId)>,
) -> Result<bool, EngineError> {
    if nullable(term) {
        return Ok(true);
    }
    if !visited.insert((term.clone(), v)) {
        return Ok(false);
    }
    for a in first_set(term) {
        let next = deriv(term, a);
        let hit = match &game.indexed.action(a).kind {
            IndexedActionKind::Shift(d) => match game.desc.board.target(v, *d) {
                Some(v2) => matches(game, &next, semi, v2, used, cap, visited)?,
                None => false,
            },
            IndexedActionKind::On(pieces) => {
                pieces.contains(&semi.piece_at(v))
                    && matches(game, &next, semi, v, used, cap, visited)?
            }
            IndexedActionKind::Compare(x, op, y) => {
                match (semi.eval(x), semi.eval(y)) {
                    (Some(xv), Some(yv)) if op.holds(xv, yv) => {
                        matches(game, &next, semi, v, used, cap, visited)?
                    }
                    _ => false,
                }
            }
            IndexedActionKind::Pattern { positive, body } => {
                let body_term = term_of(body);
                matches(game, &body_term, semi, v, used, cap, &mut HashSet::new())?
                    == *positive
                    && matches(game, &next, semi, v, used, cap, visited)?
            }
            IndexedActionKind::Off(p) => {
                if used >= cap {
                    return Err(EngineError::StraightnessCapExceeded(cap));
                }
                let mut s2 = semi.clone();
                s2.apply_off(v, *p);
                matches(game, &next, &s2, v, used + 1, cap, &mut HashSet::new())?
            }
            IndexedActionKind::Assign(var, expr) => {
                let mut s2 = semi.clone();
                match s2
                    .eval(expr)
                    .and_then(|value| s2.apply_assign(&game.desc, *var, value))
                {
                    Some(_) => {
                        if used >= cap {
                            return Err(EngineError::StraightnessCapExceeded(cap));
                        }
                        matches(game, &next, &s2, v, used + 1, cap, &mut HashSet::new())?
                    }
                    None => false,
                }
            }
            // Switch-free by construction; never matches if present.
            IndexedActionKind::Switch(_) | IndexedActionKind::SwitchKeeper => false,
        };
        if hit {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Replays a move onto a copy of the state.
pub fn apply_move(
    game: &Game,
    state: &GameState,
    mv: &Move,
) -> Result<GameState, EngineError> {
    let mut st = state.clone();
    let Some(((last_idx, _), body)) = mv.split_last() else {
        return Err(EngineError::IllegalMove);
    };
    for &(idx, v) in body {
        st.semi.position = v;
        match &game.indexed.action(idx).kind {
            IndexedActionKind::Off(p) => {
                st.semi.apply_off(v, *p);
            }
            IndexedActionKind::Assign(var, expr) => {
                let applied = st
                    .semi
                    .eval(expr)
                    .and_then(|value| st.semi.apply_assign(&game.desc, *var, value));
                if applied.is_none() {
                    return Err(EngineError::IllegalMove);
                }
            }
            _ => return Err(EngineError::IllegalMove),
        }
    }
    let (last_idx, last_v) = (*last_idx, mv.last().unwrap().1);
    st.semi.position = last_v;
    let player = match &game.indexed.action(last_idx).kind {
        IndexedActionKind::Switch(p) => Some(*p),
        IndexedActionKind::SwitchKeeper => None,
        _ => return Err(EngineError::IllegalMove),
    };
    st.semi.apply_switch(player);
    st.rules_index = last_idx;
    Ok(st)
}

/// Applies keeper moves (always the least move in term order) until a
/// player has control or the keeper is stuck.
pub fn complete_keeper(
    game: &Game,
    state: &GameState,
    cap: usize,
) -> Result<GameState, EngineError> {
    let mut st = state.clone();
    let mut iters = 0;
    while st.semi.current_player.is_none() {
        if iters >= KEEPER_ITERATION_LIMIT {
            return Err(EngineError::KeeperRunaway(KEEPER_ITERATION_LIMIT));
        }
        let moves = legal_moves(game, &st, cap)?;
        let Some(first) = moves.iter().next() else { break };
        st = apply_move(game, &st, first)?;
        iters += 1;
    }
    Ok(st)
}

/// Move counts by pure derivative search; keeper moves are completed and
/// not counted.
pub fn perft(
    game: &Game,
    state: &GameState,
    depth: u32,
    cap: usize,
) -> Result<u64, EngineError> {
    let st = complete_keeper(game, state, cap)?;
    if depth == 0 {
        return Ok(1);
    }
    let moves = legal_moves(game, &st, cap)?;
    if depth == 1 {
        return Ok(moves.len() as u64);
    }
    let mut total = 0;
    for mv in &moves {
        let child = apply_move(game, &st, mv)?;
        total += perft(game, &child, depth - 1, cap)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::recommended_cap;
    use crate::reasoner::Reasoner;

    fn act(i: usize) -> Term {
        Term::Act(i)
    }

    #[test]
    fn normal_forms() {
        assert_eq!(sum([Term::Empty, act(1), act(1)]), act(1));
        assert_eq!(cat([Term::Eps, act(1), Term::Eps]), act(1));
        assert_eq!(cat([act(1), Term::Empty]), Term::Empty);
        assert_eq!(star(Term::Empty), Term::Eps);
        assert_eq!(star(star(act(1))), star(act(1)));
    }

    #[test]
    fn derivative_membership() {
        // 1 (2 + 3)* 4
        let t = cat([act(1), star(sum([act(2), act(3)])), act(4)]);
        assert!(word_in(&t, &[1, 4]));
        assert!(word_in(&t, &[1, 3, 2, 2, 4]));
        assert!(!word_in(&t, &[1]));
        assert!(!word_in(&t, &[2, 4]));
        assert!(!word_in(&t, &[1, 4, 4]));
    }

    #[test]
    fn continuation_splits_concats_and_stars() {
        // (1 2)* 3
        let e = IExpr::Concat(vec![
            IExpr::Star(Box::new(IExpr::Concat(vec![
                IExpr::Action(1),
                IExpr::Action(2),
            ]))),
            IExpr::Action(3),
        ]);
        let after1 = continuation_term(&e, 1).unwrap();
        assert!(word_in(&after1, &[2, 3]));
        assert!(word_in(&after1, &[2, 1, 2, 3]));
        assert!(!word_in(&after1, &[3]));
        let after3 = continuation_term(&e, 3).unwrap();
        assert!(nullable(&after3));
        assert_eq!(continuation_term(&e, 9), None);
    }

    #[test]
    fn oracle_agrees_with_engine_on_a_small_game() {
        let src = "#players = p(10), q(10)
                   #pieces = e, x
                   #variables =
                   #board = a [e] {r: b} b [e] {l: a}
                   #rules = ->p ((r + l + {? r {e}}) ([x] + [e]) ->q ([x] + [e]) ->p)*";
        let game = Game::compile(src).unwrap();
        let cap = recommended_cap(&game.desc);
        let mut engine = Reasoner::new(&game);

        let mut state = game.initial_state();
        engine.complete_keeper(&mut state).unwrap();
        let oracle_state = complete_keeper(&game, &game.initial_state(), cap).unwrap();
        assert_eq!(state, oracle_state);

        let engine_moves: BTreeSet<Move> =
            engine.legal_moves(&mut state).unwrap().into_iter().collect();
        let oracle_moves = legal_moves(&game, &state, cap).unwrap();
        assert_eq!(engine_moves, oracle_moves);

        for d in 0..4 {
            let mut s = game.initial_state();
            assert_eq!(
                engine.perft(&mut s, d).unwrap(),
                perft(&game, &game.initial_state(), d, cap).unwrap(),
                "depth {d}"
            );
        }
    }

    #[test]
    fn oracle_move_application_matches_engine() {
        let src = "#players = p(10), q(10)
                   #pieces = e, x
                   #variables =
                   #board = a [e] {r: b} b [e] {l: a}
                   #rules = ->p r [x] [$q = 7] ->q";
        let game = Game::compile(src).unwrap();
        let mut engine = Reasoner::new(&game);
        let mut state = game.initial_state();
        engine.complete_keeper(&mut state).unwrap();
        let mv = engine.legal_moves(&mut state).unwrap().remove(0);

        let oracle_next = apply_move(&game, &state, &mv).unwrap();
        engine.apply_move(&mut state, &mv).unwrap();
        assert_eq!(state, oracle_next);
    }
}
