//! Canonical text form for low-level descriptions.
//!
//! The output is a pure function of the token stream, so printing the
//! printed text again is byte-identical. Sections are emitted in a fixed
//! order; board nodes and the rules body are indented by two spaces.

use crate::error::{CompileError, Span};
use crate::lexer::{Token, TokenKind, TokenStream};

/// Renders an LL token stream as canonical text.
pub fn print_canonical(stream: &TokenStream) -> Result<String, CompileError> {
    let toks = &stream.tokens;
    let mut sections: Vec<(TokenKind, &[Token])> = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if toks[i].kind != TokenKind::Hash {
            return Err(syntax(toks[i].span, "`#` starting a section"));
        }
        let header = toks
            .get(i + 1)
            .filter(|t| t.kind.is_section_keyword())
            .ok_or_else(|| syntax(toks[i].span, "section keyword"))?;
        if toks.get(i + 2).map(|t| t.kind) != Some(TokenKind::Equals) {
            return Err(syntax(header.span, "`=` after section keyword"));
        }
        let start = i + 3;
        i = start;
        while i < toks.len() && toks[i].kind != TokenKind::Hash {
            i += 1;
        }
        sections.push((header.kind, &toks[start..i]));
    }

    let order = [
        TokenKind::KwPlayers,
        TokenKind::KwPieces,
        TokenKind::KwVariables,
        TokenKind::KwBoard,
        TokenKind::KwRules,
    ];
    let mut out = String::new();
    for kind in order {
        for (k, body) in &sections {
            if *k != kind {
                continue;
            }
            match kind {
                TokenKind::KwPlayers => print_flat(&mut out, "players", body),
                TokenKind::KwPieces => print_flat(&mut out, "pieces", body),
                TokenKind::KwVariables => print_flat(&mut out, "variables", body),
                TokenKind::KwBoard => print_board(&mut out, body)?,
                _ => print_rules(&mut out, body),
            }
        }
    }
    Ok(out)
}

fn syntax(span: Span, expected: &str) -> CompileError {
    CompileError::SyntaxError { span, expected: expected.to_string() }
}

fn print_flat(out: &mut String, name: &str, body: &[Token]) {
    out.push('#');
    out.push_str(name);
    out.push_str(" =");
    if !body.is_empty() {
        out.push(' ');
        out.push_str(&join(body));
    }
    out.push('\n');
}

fn print_board(out: &mut String, body: &[Token]) -> Result<(), CompileError> {
    out.push_str("#board =\n");
    let mut i = 0;
    while i < body.len() {
        // One node: name [piece] { ... } — find the closing brace.
        let start = i;
        while i < body.len() && body[i].kind != TokenKind::RBrace {
            i += 1;
        }
        if i == body.len() {
            return Err(syntax(
                body.last().map(|t| t.span).unwrap_or_default(),
                "`}` closing a board node",
            ));
        }
        i += 1;
        out.push_str("  ");
        out.push_str(&join(&body[start..i]));
        out.push('\n');
    }
    Ok(())
}

fn print_rules(out: &mut String, body: &[Token]) {
    out.push_str("#rules =\n  ");
    out.push_str(&join(body));
    out.push('\n');
}

fn no_space_after(kind: TokenKind) -> bool {
    matches!(
        kind,
        TokenKind::LParen
            | TokenKind::LBrace
            | TokenKind::OnCheck
            | TokenKind::OnCheckNeg
            | TokenKind::LBraceVar
            | TokenKind::LBracket
            | TokenKind::LBracketVar
            | TokenKind::Arrow
            | TokenKind::Dollar
            | TokenKind::Equals
    )
}

fn no_space_before(kind: TokenKind) -> bool {
    matches!(
        kind,
        TokenKind::RParen
            | TokenKind::RBrace
            | TokenKind::RBracket
            | TokenKind::Star
            | TokenKind::Comma
            | TokenKind::Semicolon
            | TokenKind::Colon
            | TokenKind::Equals
    )
}

/// Joins tokens with canonical spacing.
fn join(toks: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in toks.iter().enumerate() {
        if i > 0 {
            let prev = toks[i - 1].kind;
            // `(` hugs a preceding identifier (`white(100)`, `up(...)`)
            // but stands off from operators and groups.
            let tight_call = t.kind == TokenKind::LParen && prev == TokenKind::Ident;
            if !(no_space_after(prev) || no_space_before(t.kind) || tight_call) {
                out.push(' ');
            }
        }
        out.push_str(&t.text);
    }
    out
}
