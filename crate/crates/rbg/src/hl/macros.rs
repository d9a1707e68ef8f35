//! Macro expansion with the `~` token-pasting metaoperator.
//!
//! Expansion proceeds left to right through the stream: a definition only
//! affects text after it, so an identifier used before its definition stays
//! a plain identifier. Macro bodies are expanded against the table as it
//! stands at definition time; `~` is applied when a macro is instantiated
//! (after argument substitution), and pasted tokens are not re-expanded.

use std::collections::HashMap;

use crate::error::{CompileError, Span};
use crate::lexer::{lex_single_token, Token, TokenKind, TokenStream};

const EXPANSION_DEPTH_LIMIT: usize = 64;

#[derive(Default)]
struct MacroSet {
    /// Body of the parameterless form, if defined.
    plain: Option<Vec<Token>>,
    /// Parameterized forms keyed by arity: (parameter names, body).
    by_arity: HashMap<usize, (Vec<String>, Vec<Token>)>,
}

type Table = HashMap<String, MacroSet>;

/// Consumes all macro definitions and replaces every later instantiation.
pub fn expand_macros(stream: &TokenStream) -> Result<TokenStream, CompileError> {
    let toks = &stream.tokens;
    let mut table: Table = HashMap::new();
    let mut out: Vec<Token> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if toks[i].kind != TokenKind::Hash {
            return Err(syntax(toks[i].span, "`#` introducing a section or macro"));
        }
        let header = toks
            .get(i + 1)
            .ok_or_else(|| syntax(toks[i].span, "section keyword or macro name after `#`"))?;
        if header.kind.is_section_keyword() {
            let eq = toks.get(i + 2);
            if eq.map(|t| t.kind) != Some(TokenKind::Equals) {
                return Err(syntax(header.span, "`=` after section keyword"));
            }
            out.push(toks[i].clone());
            out.push(header.clone());
            out.push(toks[i + 2].clone());
            i += 3;
            let body_end = body_end(toks, i);
            let expanded = expand_in(&toks[i..body_end], &table, &[], 0)?;
            out.extend(paste_pass(expanded, &[])?);
            i = body_end;
        } else if header.kind == TokenKind::Ident {
            i = define_macro(toks, i, &mut table)?;
        } else {
            return Err(syntax(header.span, "section keyword or macro name after `#`"));
        }
    }
    Ok(TokenStream { tokens: out, source_name: stream.source_name.clone() })
}

fn syntax(span: Span, expected: &str) -> CompileError {
    CompileError::SyntaxError { span, expected: expected.to_string() }
}

fn body_end(toks: &[Token], from: usize) -> usize {
    let mut i = from;
    while i < toks.len() && toks[i].kind != TokenKind::Hash {
        i += 1;
    }
    i
}

/// Parses one `#name [(p;...;p)] = body` definition starting at the `#`.
fn define_macro(toks: &[Token], at: usize, table: &mut Table) -> Result<usize, CompileError> {
    let name_tok = &toks[at + 1];
    let name = name_tok.text.clone();
    let mut i = at + 2;
    let mut params: Option<Vec<String>> = None;
    if toks.get(i).map(|t| t.kind) == Some(TokenKind::LParen) {
        let mut names = Vec::new();
        i += 1;
        loop {
            let p = toks.get(i).ok_or_else(|| syntax(name_tok.span, "parameter name"))?;
            if p.kind != TokenKind::Ident {
                return Err(syntax(p.span, "parameter name"));
            }
            if names.contains(&p.text) {
                return Err(syntax(p.span, "distinct parameter names"));
            }
            names.push(p.text.clone());
            i += 1;
            match toks.get(i).map(|t| t.kind) {
                Some(TokenKind::Semicolon) => i += 1,
                Some(TokenKind::RParen) => {
                    i += 1;
                    break;
                }
                _ => return Err(syntax(p.span, "`;` or `)` in parameter list")),
            }
        }
        params = Some(names);
    }
    if toks.get(i).map(|t| t.kind) != Some(TokenKind::Equals) {
        return Err(syntax(name_tok.span, "`=` in macro definition"));
    }
    i += 1;
    let end = body_end(toks, i);
    // Expand macro uses in the body now, against the current table; the
    // macro's own parameters shadow any macros of the same name. `~` stays
    // in place until instantiation.
    let shadow: Vec<String> = params.clone().unwrap_or_default();
    let body = expand_in(&toks[i..end], table, &shadow, 0)?;

    let set = table.entry(name.clone()).or_default();
    let clash = match &params {
        None => set.plain.is_some() || !set.by_arity.is_empty(),
        Some(ps) => set.plain.is_some() || set.by_arity.contains_key(&ps.len()),
    };
    if clash {
        return Err(CompileError::DuplicateMacro { span: name_tok.span, name });
    }
    match params {
        None => set.plain = Some(body),
        Some(ps) => {
            set.by_arity.insert(ps.len(), (ps, body));
        }
    }
    Ok(end)
}

/// Rewrites macro instantiations in `toks`. Identifiers listed in `shadow`
/// (parameters of an enclosing definition) are never treated as macros.
fn expand_in(
    toks: &[Token],
    table: &Table,
    shadow: &[String],
    depth: usize,
) -> Result<Vec<Token>, CompileError> {
    if depth > EXPANSION_DEPTH_LIMIT {
        return Err(CompileError::RecursiveExpansionLimit { limit: EXPANSION_DEPTH_LIMIT });
    }
    let mut out = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        let tok = &toks[i];
        let set = match tok.kind {
            TokenKind::Ident if !shadow.contains(&tok.text) => table.get(&tok.text),
            _ => None,
        };
        let Some(set) = set else {
            out.push(tok.clone());
            i += 1;
            continue;
        };
        let has_args = toks.get(i + 1).map(|t| t.kind) == Some(TokenKind::LParen)
            && !set.by_arity.is_empty();
        if has_args {
            let (args, next) = parse_args(toks, i + 1)?;
            if let Some((params, body)) = set.by_arity.get(&args.len()) {
                let mut expanded_args = Vec::with_capacity(args.len());
                for arg in &args {
                    expanded_args.push(expand_in(arg, table, shadow, depth + 1)?);
                }
                let substituted = substitute(body, params, &expanded_args);
                out.extend(paste_pass(substituted, shadow)?);
                i = next;
                continue;
            }
            if set.plain.is_none() {
                return Err(CompileError::ArityMismatch {
                    span: tok.span,
                    name: tok.text.clone(),
                    given: args.len(),
                });
            }
            // Fall through: the parenthesis belongs to the surrounding text.
        }
        match &set.plain {
            Some(body) => out.extend(paste_pass(body.clone(), shadow)?),
            None => out.push(tok.clone()), // parameterized macro named without arguments
        }
        i += 1;
    }
    Ok(out)
}

/// Parses a parenthesized argument list starting at the `(`; arguments are
/// token strings (possibly empty) split on top-level `;`.
fn parse_args(toks: &[Token], lparen: usize) -> Result<(Vec<Vec<Token>>, usize), CompileError> {
    let mut args = Vec::new();
    let mut current = Vec::new();
    let mut depth = 0usize;
    let mut i = lparen + 1;
    loop {
        let tok = toks
            .get(i)
            .ok_or_else(|| syntax(toks[lparen].span, "`)` closing the argument list"))?;
        match tok.kind {
            TokenKind::LParen => {
                depth += 1;
                current.push(tok.clone());
            }
            TokenKind::RParen if depth > 0 => {
                depth -= 1;
                current.push(tok.clone());
            }
            TokenKind::RParen => {
                args.push(current);
                return Ok((args, i + 1));
            }
            TokenKind::Semicolon if depth == 0 => {
                args.push(std::mem::take(&mut current));
            }
            _ => current.push(tok.clone()),
        }
        i += 1;
    }
}

fn substitute(body: &[Token], params: &[String], args: &[Vec<Token>]) -> Vec<Token> {
    let mut out = Vec::with_capacity(body.len());
    for tok in body {
        let slot = (tok.kind == TokenKind::Ident)
            .then(|| params.iter().position(|p| *p == tok.text))
            .flatten();
        match slot {
            Some(k) => out.extend(args[k].iter().cloned()),
            None => out.push(tok.clone()),
        }
    }
    out
}

/// Applies the `~` operator left to right: each `a ~ b` pair must re-lex to
/// exactly one token. Chains (`a~b~c`) fold into a single token.
///
/// A paste touching an identifier listed in `defer` (a parameter of the
/// definition being expanded) is left in place: it can only be resolved
/// once the parameter is substituted at instantiation.
pub(crate) fn paste_pass(toks: Vec<Token>, defer: &[String]) -> Result<Vec<Token>, CompileError> {
    if !toks.iter().any(|t| t.kind == TokenKind::Tilde) {
        return Ok(toks);
    }
    let deferred = |t: Option<&Token>| {
        t.is_some_and(|t| t.kind == TokenKind::Ident && defer.contains(&t.text))
    };
    let mut out: Vec<Token> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if toks[i].kind == TokenKind::Tilde {
            if deferred(out.last()) || deferred(toks.get(i + 1)) {
                out.push(toks[i].clone());
                i += 1;
                continue;
            }
            let prev = out.pop().ok_or_else(|| CompileError::InvalidPaste {
                span: toks[i].span,
                text: String::new(),
            })?;
            let next = toks.get(i + 1).ok_or_else(|| CompileError::InvalidPaste {
                span: toks[i].span,
                text: prev.text.clone(),
            })?;
            let text = format!("{}{}", prev.text, next.text);
            let pasted = lex_single_token(&text).ok_or_else(|| CompileError::InvalidPaste {
                span: toks[i].span,
                text: text.clone(),
            })?;
            out.push(Token { kind: pasted.kind, text: pasted.text, span: prev.span });
            i += 2;
        } else {
            out.push(toks[i].clone());
            i += 1;
        }
    }
    Ok(out)
}
