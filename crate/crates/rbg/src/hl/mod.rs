//! The high-level front end: macro expansion, board generators, and
//! syntactic sugar. The output of [`compile_hl_to_ll`] is a low-level
//! token stream that the parser accepts directly.

mod boards;
mod macros;
mod sugar;

pub use boards::{generate_cuboid, generate_hexagon, generate_rectangle, GeneratedBoard};
pub use macros::expand_macros;
pub use sugar::desugar;

use crate::error::CompileError;
use crate::lexer::{Token, TokenKind, TokenStream};

/// Lowers a high-level stream to the low-level core: macros are expanded,
/// board generators are instantiated into explicit vertex graphs, and the
/// power/comma sugar is rewritten. Low-level input is a fixed point.
pub fn compile_hl_to_ll(stream: &TokenStream) -> Result<TokenStream, CompileError> {
    let expanded = expand_macros(stream)?;
    let with_boards = instantiate_generators(&expanded)?;
    desugar(&with_boards)
}

/// Replaces a `rectangle`/`hexagon`/`cuboid` invocation in the board
/// section with the explicit node list it denotes.
pub fn instantiate_generators(stream: &TokenStream) -> Result<TokenStream, CompileError> {
    let toks = &stream.tokens;
    let mut out: Vec<Token> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        let is_board_header = toks[i].kind == TokenKind::Hash
            && toks.get(i + 1).map(|t| t.kind) == Some(TokenKind::KwBoard)
            && toks.get(i + 2).map(|t| t.kind) == Some(TokenKind::Equals);
        if is_board_header {
            out.push(toks[i].clone());
            out.push(toks[i + 1].clone());
            out.push(toks[i + 2].clone());
            i += 3;
            if matches!(
                toks.get(i).map(|t| t.kind),
                Some(TokenKind::KwRectangle | TokenKind::KwHexagon | TokenKind::KwCuboid)
            ) {
                let (board, next) = boards::parse_generator(toks, i)?;
                out.extend(board.to_tokens());
                i = next;
            }
        } else {
            out.push(toks[i].clone());
            i += 1;
        }
    }
    Ok(TokenStream { tokens: out, source_name: stream.source_name.clone() })
}
