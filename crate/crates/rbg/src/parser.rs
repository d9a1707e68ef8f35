//! Recursive-descent parser for the low-level core language.
//!
//! Produces a validated [`AbstractDescription`]: every identifier in the
//! rules is resolved against the declared name spaces, edge labels are
//! unique per vertex, and the four name spaces are pairwise disjoint.

use std::collections::HashMap;

use crate::ast::*;
use crate::error::{CompileError, Span};
use crate::lexer::{Token, TokenKind, TokenStream};

pub fn parse_description(stream: &TokenStream) -> Result<AbstractDescription, CompileError> {
    let sections = split_sections(&stream.tokens)?;
    let players = parse_bounded_list(section(&sections, "players")?, false)?;
    let pieces = parse_ident_list(section(&sections, "pieces")?)?;
    let variables = parse_bounded_list(section(&sections, "variables")?, true)?;

    let board = parse_board(section(&sections, "board")?, &pieces)?;

    // Combined resolution table; players come first in the variable space.
    let mut names: HashMap<String, Resolution> = HashMap::new();
    let mut declare = |name: &str, res: Resolution, span: Span| {
        if names.insert(name.to_string(), res).is_some() {
            return Err(CompileError::DisjointnessViolation {
                span,
                name: name.to_string(),
            });
        }
        Ok(())
    };
    for (i, (name, _)) in players.iter().enumerate() {
        declare(name, Resolution::Player(i), Span::default())?;
    }
    for (i, name) in pieces.iter().enumerate() {
        declare(name, Resolution::Piece(i), Span::default())?;
    }
    for (i, (name, _)) in variables.iter().enumerate() {
        declare(name, Resolution::Variable(players.len() + i), Span::default())?;
    }
    for (i, name) in board.dirs.iter().enumerate() {
        declare(name, Resolution::Dir(i), Span::default())?;
    }

    let mut parser = RulesParser { toks: section(&sections, "rules")?, pos: 0, names: &names };
    let rules = parser.parse_sum()?;
    if let Some(t) = parser.peek() {
        return Err(syntax(t.span, "end of rules"));
    }
    Ok(AbstractDescription { players, pieces, variables, board, rules })
}

#[derive(Clone, Copy)]
enum Resolution {
    Player(PlayerId),
    Piece(PieceId),
    Variable(VarId),
    Dir(DirId),
}

fn syntax(span: Span, expected: &str) -> CompileError {
    CompileError::SyntaxError { span, expected: expected.to_string() }
}

fn section_name(kind: TokenKind) -> Option<&'static str> {
    Some(match kind {
        TokenKind::KwPlayers => "players",
        TokenKind::KwPieces => "pieces",
        TokenKind::KwVariables => "variables",
        TokenKind::KwBoard => "board",
        TokenKind::KwRules => "rules",
        _ => return None,
    })
}

fn split_sections(toks: &[Token]) -> Result<HashMap<&'static str, &[Token]>, CompileError> {
    let mut sections = HashMap::new();
    let mut i = 0;
    while i < toks.len() {
        if toks[i].kind != TokenKind::Hash {
            return Err(syntax(toks[i].span, "`#` starting a section"));
        }
        let header = toks.get(i + 1).ok_or_else(|| syntax(toks[i].span, "section keyword"))?;
        let name = section_name(header.kind)
            .ok_or_else(|| syntax(header.span, "section keyword"))?;
        let eq = toks.get(i + 2);
        if eq.map(|t| t.kind) != Some(TokenKind::Equals) {
            return Err(syntax(header.span, "`=` after section keyword"));
        }
        i += 3;
        let start = i;
        while i < toks.len() && toks[i].kind != TokenKind::Hash {
            i += 1;
        }
        if sections.insert(name, &toks[start..i]).is_some() {
            return Err(CompileError::DuplicateSection { span: header.span, name });
        }
    }
    Ok(sections)
}

fn section<'a>(
    sections: &HashMap<&'static str, &'a [Token]>,
    name: &'static str,
) -> Result<&'a [Token], CompileError> {
    sections.get(name).copied().ok_or(CompileError::MissingSection(name))
}

/// `name(bound), name(bound), ...`; players require at least one entry.
fn parse_bounded_list(
    toks: &[Token],
    may_be_empty: bool,
) -> Result<Vec<(String, u64)>, CompileError> {
    let mut out = Vec::new();
    if toks.is_empty() && may_be_empty {
        return Ok(out);
    }
    let mut i = 0;
    loop {
        let name = expect_ident(toks, &mut i, "name")?;
        expect_kind(toks, &mut i, TokenKind::LParen, "`(`")?;
        let bound_tok = toks.get(i).ok_or_else(|| syntax(name.span, "bound"))?;
        if bound_tok.kind != TokenKind::Nat {
            return Err(syntax(bound_tok.span, "numeric bound"));
        }
        let bound: u64 = bound_tok
            .text
            .parse()
            .map_err(|_| syntax(bound_tok.span, "representable bound"))?;
        i += 1;
        expect_kind(toks, &mut i, TokenKind::RParen, "`)`")?;
        if out.iter().any(|(n, _)| *n == name.text) {
            return Err(CompileError::DisjointnessViolation {
                span: name.span,
                name: name.text.clone(),
            });
        }
        out.push((name.text.clone(), bound));
        if i >= toks.len() {
            return Ok(out);
        }
        expect_kind(toks, &mut i, TokenKind::Comma, "`,`")?;
    }
}

fn parse_ident_list(toks: &[Token]) -> Result<Vec<String>, CompileError> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let name = expect_ident(toks, &mut i, "name")?;
        if out.contains(&name.text) {
            return Err(CompileError::DisjointnessViolation {
                span: name.span,
                name: name.text.clone(),
            });
        }
        out.push(name.text.clone());
        if i >= toks.len() {
            return Ok(out);
        }
        expect_kind(toks, &mut i, TokenKind::Comma, "`,`")?;
    }
}

fn expect_ident<'a>(
    toks: &'a [Token],
    i: &mut usize,
    what: &str,
) -> Result<&'a Token, CompileError> {
    let t = toks
        .get(*i)
        .ok_or_else(|| syntax(toks.last().map(|t| t.span).unwrap_or_default(), what))?;
    if t.kind != TokenKind::Ident {
        return Err(syntax(t.span, what));
    }
    *i += 1;
    Ok(t)
}

fn expect_kind(
    toks: &[Token],
    i: &mut usize,
    kind: TokenKind,
    what: &str,
) -> Result<(), CompileError> {
    let t = toks
        .get(*i)
        .ok_or_else(|| syntax(toks.last().map(|t| t.span).unwrap_or_default(), what))?;
    if t.kind != kind {
        return Err(syntax(t.span, what));
    }
    *i += 1;
    Ok(())
}

/// Parses `name [piece] {label: target, ...}` nodes. The first node is the
/// starting vertex. An empty `{}` edge set is accepted (isolated vertices
/// arise from 1×1 generated boards).
fn parse_board(toks: &[Token], pieces: &[String]) -> Result<BoardGraph, CompileError> {
    struct RawNode {
        name: String,
        piece: PieceId,
        edges: Vec<(String, String, Span)>,
    }
    let mut nodes: Vec<RawNode> = Vec::new();
    let mut dirs: Vec<String> = Vec::new();
    let mut i = 0;
    if toks.is_empty() {
        return Err(CompileError::EmptyBoard(Span::default()));
    }
    while i < toks.len() {
        let name = expect_ident(toks, &mut i, "vertex name")?.clone();
        if nodes.iter().any(|n| n.name == name.text) {
            return Err(CompileError::DisjointnessViolation {
                span: name.span,
                name: name.text.clone(),
            });
        }
        expect_kind(toks, &mut i, TokenKind::LBracket, "`[`")?;
        let piece_tok = expect_ident(toks, &mut i, "piece name")?;
        let piece = pieces.iter().position(|p| *p == piece_tok.text).ok_or_else(|| {
            CompileError::UndeclaredIdentifier {
                span: piece_tok.span,
                name: piece_tok.text.clone(),
            }
        })?;
        expect_kind(toks, &mut i, TokenKind::RBracket, "`]`")?;
        expect_kind(toks, &mut i, TokenKind::LBrace, "`{`")?;
        let mut edges = Vec::new();
        if toks.get(i).map(|t| t.kind) != Some(TokenKind::RBrace) {
            loop {
                let label = expect_ident(toks, &mut i, "edge label")?.clone();
                expect_kind(toks, &mut i, TokenKind::Colon, "`:`")?;
                let target = expect_ident(toks, &mut i, "target vertex")?.clone();
                if edges.iter().any(|(l, _, _): &(String, String, Span)| *l == label.text) {
                    return Err(CompileError::DuplicateEdgeLabel {
                        span: label.span,
                        name: label.text.clone(),
                    });
                }
                if !dirs.contains(&label.text) {
                    dirs.push(label.text.clone());
                }
                edges.push((label.text.clone(), target.text.clone(), target.span));
                match toks.get(i).map(|t| t.kind) {
                    Some(TokenKind::Comma) => i += 1,
                    Some(TokenKind::RBrace) => break,
                    _ => {
                        return Err(syntax(
                            toks.get(i).map(|t| t.span).unwrap_or(label.span),
                            "`,` or `}`",
                        ))
                    }
                }
            }
        }
        expect_kind(toks, &mut i, TokenKind::RBrace, "`}`")?;
        nodes.push(RawNode { name: name.text, piece, edges });
    }

    let vertex_names: Vec<String> = nodes.iter().map(|n| n.name.clone()).collect();
    let mut delta = vec![NO_TARGET; nodes.len() * dirs.len()];
    for (v, node) in nodes.iter().enumerate() {
        for (label, target, tspan) in &node.edges {
            let d = dirs.iter().position(|x| x == label).unwrap();
            let t = vertex_names.iter().position(|x| x == target).ok_or_else(|| {
                CompileError::UndeclaredIdentifier { span: *tspan, name: target.clone() }
            })?;
            delta[v * dirs.len() + d] = t as u32;
        }
    }
    Ok(BoardGraph {
        vertex_names,
        dirs,
        initial_pieces: nodes.iter().map(|n| n.piece).collect(),
        delta,
    })
}

struct RulesParser<'a> {
    toks: &'a [Token],
    pos: usize,
    names: &'a HashMap<String, Resolution>,
}

impl<'a> RulesParser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.peek().map(|t| t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'a Token, CompileError> {
        let span = self.end_span();
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.bump().unwrap()),
            Some(t) => Err(syntax(t.span, what)),
            None => Err(syntax(span, what)),
        }
    }

    fn end_span(&self) -> Span {
        self.toks.last().map(|t| t.span).unwrap_or_default()
    }

    fn resolve(&self, tok: &Token) -> Result<Resolution, CompileError> {
        self.names.get(&tok.text).copied().ok_or_else(|| {
            CompileError::UndeclaredIdentifier { span: tok.span, name: tok.text.clone() }
        })
    }

    fn parse_sum(&mut self) -> Result<RulesExpr, CompileError> {
        let mut items = vec![self.parse_concat()?];
        while self.eat(TokenKind::Plus) {
            items.push(self.parse_concat()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { RulesExpr::Sum(items) })
    }

    fn parse_concat(&mut self) -> Result<RulesExpr, CompileError> {
        let mut items = vec![self.parse_element()?];
        while let Some(t) = self.peek() {
            if matches!(t.kind, TokenKind::Plus | TokenKind::RParen | TokenKind::RBrace) {
                break;
            }
            items.push(self.parse_element()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { RulesExpr::Concat(items) })
    }

    fn parse_element(&mut self) -> Result<RulesExpr, CompileError> {
        let mut expr = if self.eat(TokenKind::LParen) {
            let inner = self.parse_sum()?;
            self.expect(TokenKind::RParen, "`)`")?;
            inner
        } else {
            self.parse_action()?
        };
        while self.eat(TokenKind::Star) {
            expr = RulesExpr::Star(Box::new(expr));
        }
        Ok(expr)
    }

    fn parse_action(&mut self) -> Result<RulesExpr, CompileError> {
        let tok = self
            .bump()
            .ok_or_else(|| syntax(self.end_span(), "action"))?;
        let span = tok.span;
        let kind = match tok.kind {
            TokenKind::Ident => match self.resolve(tok)? {
                Resolution::Dir(d) => ActionKind::Shift(d),
                _ => return Err(syntax(span, "edge label for a shift")),
            },
            TokenKind::LBrace => {
                let mut set = Vec::new();
                if !self.eat(TokenKind::RBrace) {
                    loop {
                        let p = self.expect(TokenKind::Ident, "piece name")?;
                        match self.resolve(p)? {
                            Resolution::Piece(id) => {
                                if !set.contains(&id) {
                                    set.push(id);
                                }
                            }
                            _ => return Err(syntax(p.span, "piece name")),
                        }
                        if self.eat(TokenKind::RBrace) {
                            break;
                        }
                        self.expect(TokenKind::Comma, "`,` or `}`")?;
                    }
                }
                set.sort_unstable();
                ActionKind::On(set)
            }
            TokenKind::LBracket => {
                let p = self.expect(TokenKind::Ident, "piece name")?;
                let id = match self.resolve(p)? {
                    Resolution::Piece(id) => id,
                    _ => return Err(syntax(p.span, "piece name")),
                };
                self.expect(TokenKind::RBracket, "`]`")?;
                ActionKind::Off(id)
            }
            TokenKind::LBracketVar => {
                let v = self.expect(TokenKind::Ident, "variable name")?;
                let id = match self.resolve(v)? {
                    Resolution::Variable(id) => id,
                    Resolution::Player(p) => p,
                    _ => return Err(syntax(v.span, "assignable variable")),
                };
                self.expect(TokenKind::Equals, "`=`")?;
                let rvalue = self.parse_arith_sum()?;
                self.expect(TokenKind::RBracket, "`]`")?;
                ActionKind::Assign(id, rvalue)
            }
            TokenKind::LBraceVar => {
                let lhs = self.parse_arith_sum()?;
                let op_tok = self
                    .bump()
                    .ok_or_else(|| syntax(self.end_span(), "comparison operator"))?;
                let op = match op_tok.kind {
                    TokenKind::EqEq => CmpOp::Eq,
                    TokenKind::NotEqual => CmpOp::Ne,
                    TokenKind::Less => CmpOp::Lt,
                    TokenKind::LessEq => CmpOp::Le,
                    TokenKind::Greater => CmpOp::Gt,
                    TokenKind::GreaterEq => CmpOp::Ge,
                    _ => return Err(syntax(op_tok.span, "comparison operator")),
                };
                let rhs = self.parse_arith_sum()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                ActionKind::Compare(lhs, op, rhs)
            }
            TokenKind::Arrow => {
                let p = self.expect(TokenKind::Ident, "player name")?;
                match self.resolve(p)? {
                    Resolution::Player(id) => ActionKind::Switch(id),
                    _ => return Err(syntax(p.span, "player name")),
                }
            }
            TokenKind::DoubleArrow => ActionKind::SwitchKeeper,
            TokenKind::OnCheck | TokenKind::OnCheckNeg => {
                let positive = tok.kind == TokenKind::OnCheck;
                let body = self.parse_sum()?;
                self.expect(TokenKind::RBrace, "`}` closing the pattern")?;
                ActionKind::Pattern { positive, body: Box::new(body) }
            }
            _ => return Err(syntax(span, "action")),
        };
        Ok(RulesExpr::Action(ActionSpec { kind, span }))
    }

    fn parse_arith_sum(&mut self) -> Result<ArithExpr, CompileError> {
        let mut lhs = self.parse_arith_product()?;
        loop {
            if self.eat(TokenKind::Plus) {
                lhs = ArithExpr::Add(Box::new(lhs), Box::new(self.parse_arith_product()?));
            } else if self.eat(TokenKind::Minus) {
                lhs = ArithExpr::Sub(Box::new(lhs), Box::new(self.parse_arith_product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_arith_product(&mut self) -> Result<ArithExpr, CompileError> {
        let mut lhs = self.parse_arith_leaf()?;
        loop {
            if self.eat(TokenKind::Star) {
                lhs = ArithExpr::Mul(Box::new(lhs), Box::new(self.parse_arith_leaf()?));
            } else if self.eat(TokenKind::Slash) {
                lhs = ArithExpr::Div(Box::new(lhs), Box::new(self.parse_arith_leaf()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_arith_leaf(&mut self) -> Result<ArithExpr, CompileError> {
        let tok = self
            .bump()
            .ok_or_else(|| syntax(self.end_span(), "arithmetic expression"))?;
        match tok.kind {
            TokenKind::Nat => {
                let n: i64 = tok
                    .text
                    .parse()
                    .map_err(|_| syntax(tok.span, "representable number"))?;
                Ok(ArithExpr::Const(n))
            }
            TokenKind::Ident => match self.resolve(tok)? {
                Resolution::Variable(id) => Ok(ArithExpr::Var(id)),
                Resolution::Player(p) => Ok(ArithExpr::Var(p)),
                Resolution::Piece(p) => Ok(ArithExpr::PieceCount(p)),
                Resolution::Dir(_) => Err(syntax(tok.span, "variable or piece name")),
            },
            TokenKind::LParen => {
                let inner = self.parse_arith_sum()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(syntax(tok.span, "arithmetic expression")),
        }
    }
}
