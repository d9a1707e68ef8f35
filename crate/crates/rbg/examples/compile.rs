//! Lower a high-level description (macros, board generators, powers,
//! comma lists) to the canonical low-level text.
//!
//! Usage: cargo run --example compile -- [FILE]

use rbg::hl::compile_hl_to_ll;
use rbg::lexer::tokenize_named;
use rbg::printer::print_canonical;

fn main() {
    let file = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "games/breakthrough.rbg".into());
    let source = std::fs::read_to_string(&file).expect("game file");

    let tokens = tokenize_named(&source, &file).expect("lexable");
    let lowered = compile_hl_to_ll(&tokens).expect("expandable");
    let text = print_canonical(&lowered).expect("well-formed sections");
    print!("{text}");
}
