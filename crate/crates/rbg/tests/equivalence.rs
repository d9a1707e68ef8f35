//! Cross-checks the engine's move search against the independent
//! derivative-based reference implementation, over whole game trees.

use std::collections::BTreeSet;

use rbg::analyzer::recommended_cap;
use rbg::{oracle, Game, Reasoner};

fn load(name: &str) -> Game {
    let path = format!("{}/../../games/{name}", env!("CARGO_MANIFEST_DIR"));
    let source = std::fs::read_to_string(&path).unwrap();
    Game::compile_named(&source, &path).unwrap()
}

/// Walks the full game tree to `depth`, asserting at every node that the
/// engine and the reference implementation agree on the keeper-completed
/// state and on the exact set of legal moves.
fn walk(game: &Game, reasoner: &mut Reasoner, state: &mut rbg::state::GameState, depth: u32) {
    let cap = reasoner.cap();
    let completed_ref = oracle::complete_keeper(game, state, cap).unwrap();
    let undos = reasoner.complete_keeper(state).unwrap();
    assert_eq!(*state, completed_ref, "keeper completion diverges");

    let engine_moves = reasoner.legal_moves(state).unwrap();
    let engine_set: BTreeSet<_> = engine_moves.iter().cloned().collect();
    assert_eq!(engine_set.len(), engine_moves.len(), "engine produced a duplicate move");
    let ref_set = oracle::legal_moves(game, state, cap).unwrap();
    assert_eq!(engine_set, ref_set, "legal move sets diverge");

    if depth > 0 {
        for mv in &engine_moves {
            let child_ref = oracle::apply_move(game, state, mv).unwrap();
            let undo = reasoner.apply_move(state, mv).unwrap();
            assert_eq!(*state, child_ref, "applying a move diverges");
            walk(game, reasoner, state, depth - 1);
            reasoner.undo_move(state, undo);
        }
    }
    reasoner.undo_completion(state, undos);
}

fn check_game(name: &str, depth: u32) {
    let game = load(name);
    let cap = recommended_cap(&game.desc);
    let mut reasoner = Reasoner::with_cap(&game, cap);
    let mut state = game.initial_state();
    let snapshot = state.clone();
    walk(&game, &mut reasoner, &mut state, depth);
    assert_eq!(state, snapshot, "tree walk must restore the initial state");
}

#[test]
fn breakthrough_3x3_trees_agree_to_depth_3() {
    check_game("breakthrough3x3.rbg", 3);
}

#[test]
fn tic_tac_toe_trees_agree_to_depth_3() {
    check_game("tic_tac_toe.rbg", 3);
}

#[test]
fn connect_four_trees_agree_to_depth_2() {
    check_game("connect_four.rbg", 2);
}
