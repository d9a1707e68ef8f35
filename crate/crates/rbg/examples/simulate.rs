//! Play one random game, printing every move as its (action index,
//! vertex) pairs, and the final scores.
//!
//! Usage: cargo run --example simulate -- [FILE] [SEED]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rbg::{Game, Reasoner};

fn main() {
    let mut args = std::env::args().skip(1);
    let file = args.next().unwrap_or_else(|| "games/tic_tac_toe.rbg".into());
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(0);

    let source = std::fs::read_to_string(&file).expect("game file");
    let game = Game::compile_named(&source, &file).expect("valid description");
    let mut reasoner = Reasoner::new(&game);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut state = game.initial_state();
    for ply in 1..=200 {
        reasoner.complete_keeper(&mut state).expect("proper game");
        let moves = reasoner.legal_moves(&mut state).expect("proper game");
        if moves.is_empty() {
            break;
        }
        let player = match state.semi.current_player {
            Some(p) => game.desc.player_name(p),
            None => "keeper",
        };
        let mv = moves[rng.gen_range(0..moves.len())].clone();
        let shown: Vec<String> = mv
            .iter()
            .map(|&(idx, v)| format!("({idx}, {})", game.desc.board.vertex_names[v]))
            .collect();
        println!("ply {ply} ({player}): {}", shown.join(" "));
        reasoner.apply_move(&mut state, &mv).expect("legal move");
    }

    println!("final scores:");
    for (player, score) in state.semi.scores(&game.desc) {
        println!("  {player}: {score}");
    }
}
