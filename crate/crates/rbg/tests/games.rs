//! End-to-end checks over the bundled game descriptions.

use rbg::analyzer::{strong_straightness, validate, StraightValue};
use rbg::error::{EngineError, Severity};
use rbg::reasoner::Reasoner;
use rbg::Game;

fn load(name: &str) -> Game {
    let path = format!("{}/../../games/{name}", env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(&path).unwrap();
    Game::compile_named(&src, name).unwrap()
}

#[test]
fn all_bundled_games_compile() {
    for name in [
        "breakthrough.rbg",
        "breakthrough3x3.rbg",
        "tic_tac_toe.rbg",
        "connect_four.rbg",
        "keeper_nondet.rbg",
    ] {
        let game = load(name);
        assert!(
            !validate(&game.desc).iter().any(|d| d.severity == Severity::Error),
            "{name} has error diagnostics"
        );
    }
}

#[test]
fn breakthrough_is_three_straight() {
    let game = load("breakthrough.rbg");
    assert_eq!(strong_straightness(&game.desc), StraightValue::Finite(3));
}

#[test]
fn breakthrough_opening_has_22_moves() {
    let game = load("breakthrough.rbg");
    let mut r = Reasoner::new(&game);
    let mut s = game.initial_state();
    assert_eq!(r.perft(&mut s, 1).unwrap(), 22);
    assert_eq!(s, game.initial_state());
}

#[test]
fn tic_tac_toe_perft_is_falling_factorial() {
    let game = load("tic_tac_toe.rbg");
    let mut r = Reasoner::new(&game);
    let mut s = game.initial_state();
    assert_eq!(r.perft(&mut s, 1).unwrap(), 9);
    assert_eq!(r.perft(&mut s, 2).unwrap(), 72);
    assert_eq!(r.perft(&mut s, 3).unwrap(), 504);
}

#[test]
fn connect_four_perft_is_column_count() {
    let game = load("connect_four.rbg");
    let mut r = Reasoner::new(&game);
    let mut s = game.initial_state();
    assert_eq!(r.perft(&mut s, 1).unwrap(), 7);
    assert_eq!(r.perft(&mut s, 2).unwrap(), 49);
}

#[test]
fn keeper_nondeterminism_fixture() {
    let game = load("keeper_nondet.rbg");

    let mut strict = Reasoner::new(&game);
    strict.set_debug_keeper(true);
    let mut s = game.initial_state();
    assert!(matches!(
        strict.complete_keeper(&mut s),
        Err(EngineError::KeeperNondeterminism)
    ));

    // Without debugging the first choice in rule order is taken.
    let mut lax = Reasoner::new(&game);
    let mut s = game.initial_state();
    lax.complete_keeper(&mut s).unwrap();
    assert_eq!(s.semi.current_player, Some(0));
    assert_eq!(game.desc.board.vertex_names[s.semi.position], "west");
}
