//! Flat Monte Carlo: uniformly random playouts from the initial state,
//! reporting mean scores per player.
//!
//! Usage: cargo run --release --example monte_carlo -- [FILE] [PLAYOUTS] [SEED]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rbg::{Game, Reasoner};

fn main() {
    let mut args = std::env::args().skip(1);
    let file = args.next().unwrap_or_else(|| "games/breakthrough.rbg".into());
    let playouts: u64 = args.next().map(|p| p.parse().expect("playouts")).unwrap_or(100);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(0);

    let source = std::fs::read_to_string(&file).expect("game file");
    let game = Game::compile_named(&source, &file).expect("valid description");
    let mut reasoner = Reasoner::new(&game);

    let mut totals = vec![0i64; game.desc.players.len()];
    let mut plies = 0usize;
    for i in 0..playouts {
        // One generator stream per playout keeps results reproducible.
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
        let mut state = game.initial_state();
        let end = reasoner
            .random_playout(&mut state, &mut rng, 1000)
            .expect("proper game");
        plies += end.plies;
        for (k, (_, score)) in end.scores.iter().enumerate() {
            totals[k] += score;
        }
    }

    println!("{playouts} playouts, {plies} moves, seed {seed}");
    for (k, (player, _)) in game.desc.players.iter().enumerate() {
        println!("  {player}: mean score {:.2}", totals[k] as f64 / playouts as f64);
    }
}
