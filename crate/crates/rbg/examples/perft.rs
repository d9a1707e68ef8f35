//! Count the game tree of a description to a fixed depth.
//!
//! Usage: cargo run --release --example perft -- [FILE] [DEPTH]
//! Defaults to breakthrough at depth 4.

use rbg::{Game, Reasoner};

fn main() {
    let mut args = std::env::args().skip(1);
    let file = args.next().unwrap_or_else(|| "games/breakthrough.rbg".into());
    let depth: u32 = args.next().map(|d| d.parse().expect("depth")).unwrap_or(4);

    let source = std::fs::read_to_string(&file).expect("game file");
    let game = Game::compile_named(&source, &file).expect("valid description");
    let mut reasoner = Reasoner::new(&game);

    for d in 0..=depth {
        let start = std::time::Instant::now();
        let mut state = game.initial_state();
        let nodes = reasoner.perft(&mut state, d).expect("proper game");
        let secs = start.elapsed().as_secs_f64();
        println!(
            "perft({d}) = {nodes:>12}   {:>8.1} ms   {:>10.0} nodes/s",
            secs * 1000.0,
            if secs > 0.0 { nodes as f64 / secs } else { 0.0 },
        );
    }
}
