//! Syntactic sugar of the rules section: `expr^n` powers, comma-separated
//! piece choices `[a,b]`, and comma-separated assignments `[$x=1,y=2]`.
//! Only the `#rules` body is rewritten; other sections pass through.

use crate::error::{CompileError, Span};
use crate::lexer::{Token, TokenKind, TokenStream};

pub fn desugar(stream: &TokenStream) -> Result<TokenStream, CompileError> {
    let toks = &stream.tokens;
    let mut out = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        let is_rules_header = toks[i].kind == TokenKind::Hash
            && toks.get(i + 1).map(|t| t.kind) == Some(TokenKind::KwRules)
            && toks.get(i + 2).map(|t| t.kind) == Some(TokenKind::Equals);
        if is_rules_header {
            out.push(toks[i].clone());
            out.push(toks[i + 1].clone());
            out.push(toks[i + 2].clone());
            i += 3;
            let mut end = i;
            while end < toks.len() && toks[end].kind != TokenKind::Hash {
                end += 1;
            }
            let powered = expand_powers(&toks[i..end])?;
            out.extend(expand_commas(&powered)?);
            i = end;
        } else {
            out.push(toks[i].clone());
            i += 1;
        }
    }
    Ok(TokenStream { tokens: out, source_name: stream.source_name.clone() })
}

fn is_brace_opener(kind: TokenKind) -> bool {
    matches!(
        kind,
        TokenKind::LBrace | TokenKind::OnCheck | TokenKind::OnCheckNeg | TokenKind::LBraceVar
    )
}

/// Index in `out` where its trailing expression element begins: a bracket,
/// brace, or paren group, a `*`-closed element, a switch, or an identifier.
fn element_start(out: &[Token], caret: Span) -> Result<usize, CompileError> {
    let err = || CompileError::SyntaxError {
        span: caret,
        expected: "expression before `^`".to_string(),
    };
    let last = out.last().ok_or_else(err)?;
    let scan_back = |is_open: fn(TokenKind) -> bool, close: TokenKind| {
        let mut depth = 0usize;
        for (i, t) in out.iter().enumerate().rev() {
            if t.kind == close {
                depth += 1;
            } else if is_open(t.kind) {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
        }
        Err(err())
    };
    match last.kind {
        TokenKind::RBracket => {
            scan_back(|k| matches!(k, TokenKind::LBracket | TokenKind::LBracketVar), TokenKind::RBracket)
        }
        TokenKind::RBrace => scan_back(is_brace_opener, TokenKind::RBrace),
        TokenKind::RParen => scan_back(|k| k == TokenKind::LParen, TokenKind::RParen),
        TokenKind::Star => element_start(&out[..out.len() - 1], caret),
        TokenKind::DoubleArrow => Ok(out.len() - 1),
        TokenKind::Ident | TokenKind::Nat => {
            let s = out.len() - 1;
            if s > 0 && out[s - 1].kind == TokenKind::Arrow {
                Ok(s - 1)
            } else {
                Ok(s)
            }
        }
        _ => Err(err()),
    }
}

/// Rewrites `E^n` into n concatenated copies of E.
fn expand_powers(toks: &[Token]) -> Result<Vec<Token>, CompileError> {
    let mut out: Vec<Token> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if toks[i].kind != TokenKind::Caret {
            out.push(toks[i].clone());
            i += 1;
            continue;
        }
        let caret = toks[i].span;
        let n_tok = toks.get(i + 1).filter(|t| t.kind == TokenKind::Nat).ok_or_else(|| {
            CompileError::SyntaxError { span: caret, expected: "number after `^`".to_string() }
        })?;
        let n: usize = n_tok.text.parse().map_err(|_| CompileError::SyntaxError {
            span: n_tok.span,
            expected: "representable power".to_string(),
        })?;
        if n == 0 {
            return Err(CompileError::ZeroPower(caret));
        }
        let start = element_start(&out, caret)?;
        let element: Vec<Token> = out[start..].to_vec();
        for _ in 1..n {
            out.extend(element.iter().cloned());
        }
        i += 2;
    }
    Ok(out)
}

/// Rewrites `[a,b,c]` into `([a]+[b]+[c])` and `[$x=e1,y=e2]` into
/// `[$x=e1][$y=e2]`. Commas inside braces are untouched.
fn expand_commas(toks: &[Token]) -> Result<Vec<Token>, CompileError> {
    let mut out: Vec<Token> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        match toks[i].kind {
            TokenKind::LBracket => {
                let (items, next) = split_bracket(toks, i)?;
                if items.len() == 1 {
                    out.extend(toks[i..next].iter().cloned());
                } else {
                    let span = toks[i].span;
                    out.push(Token::synthetic(TokenKind::LParen, "("));
                    for (k, item) in items.iter().enumerate() {
                        if k > 0 {
                            out.push(Token::synthetic(TokenKind::Plus, "+"));
                        }
                        if item.iter().any(|t| t.kind == TokenKind::Equals) {
                            return Err(CompileError::MixedCommaList(span));
                        }
                        match item.as_slice() {
                            [t] if t.kind == TokenKind::Ident => {
                                out.push(Token::synthetic(TokenKind::LBracket, "["));
                                out.push(t.clone());
                                out.push(Token::synthetic(TokenKind::RBracket, "]"));
                            }
                            _ => {
                                return Err(CompileError::SyntaxError {
                                    span,
                                    expected: "piece name in bracket list".to_string(),
                                })
                            }
                        }
                    }
                    out.push(Token::synthetic(TokenKind::RParen, ")"));
                }
                i = next;
            }
            TokenKind::LBracketVar => {
                let (items, next) = split_bracket(toks, i)?;
                if items.len() == 1 {
                    out.extend(toks[i..next].iter().cloned());
                } else {
                    let span = toks[i].span;
                    for item in &items {
                        if !item.iter().any(|t| t.kind == TokenKind::Equals) {
                            return Err(CompileError::MixedCommaList(span));
                        }
                        out.push(Token::synthetic(TokenKind::LBracketVar, "[$"));
                        out.extend(item.iter().cloned());
                        out.push(Token::synthetic(TokenKind::RBracket, "]"));
                    }
                }
                i = next;
            }
            _ => {
                out.push(toks[i].clone());
                i += 1;
            }
        }
    }
    Ok(out)
}

/// Splits the bracket group opening at `at` on top-level commas (paren
/// depth 0); returns the items and the index past the closing `]`.
fn split_bracket(
    toks: &[Token],
    at: usize,
) -> Result<(Vec<Vec<Token>>, usize), CompileError> {
    let mut items = Vec::new();
    let mut current = Vec::new();
    let mut depth = 0usize;
    let mut i = at + 1;
    loop {
        let t = toks.get(i).ok_or_else(|| CompileError::SyntaxError {
            span: toks[at].span,
            expected: "`]`".to_string(),
        })?;
        match t.kind {
            TokenKind::LParen => {
                depth += 1;
                current.push(t.clone());
            }
            TokenKind::RParen => {
                depth = depth.checked_sub(1).ok_or_else(|| CompileError::SyntaxError {
                    span: t.span,
                    expected: "`]`".to_string(),
                })?;
                current.push(t.clone());
            }
            TokenKind::Comma if depth == 0 => items.push(std::mem::take(&mut current)),
            TokenKind::RBracket => {
                items.push(current);
                return Ok((items, i + 1));
            }
            _ => current.push(t.clone()),
        }
        i += 1;
    }
}
