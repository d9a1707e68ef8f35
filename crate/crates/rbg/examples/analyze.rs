//! Static analysis: straightness of the rules and properness
//! diagnostics.
//!
//! Usage: cargo run --example analyze -- [FILE]

use rbg::analyzer::{straight_quad, strong_straightness, validate};
use rbg::Game;

fn main() {
    let file = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "games/breakthrough.rbg".into());
    let source = std::fs::read_to_string(&file).expect("game file");
    let game = Game::compile_named(&source, &file).expect("valid description");

    let quad = straight_quad(&game.desc.rules);
    println!("suffix   bound: {}", quad.msuff);
    println!("prefix   bound: {}", quad.mpref);
    println!("factor   bound: {}", quad.mfact);
    println!("word     bound: {}", quad.mword);
    println!("strong straightness: {}", strong_straightness(&game.desc));
    println!();
    for diagnostic in validate(&game.desc) {
        println!("{diagnostic}");
    }
}
