//! Board generators: `rectangle`, `hexagon`, and `cuboid`.
//!
//! Each generator produces an explicit vertex graph with auto-assigned
//! names. Cells may be omitted to punch holes in the shape; omitted cells
//! produce no vertex and no incident edges.

use crate::error::{CompileError, Span};
use crate::lexer::{Token, TokenKind};

/// An instantiated board: named vertices with initial pieces, and labelled
/// directed edges. Vertex order is the emission (row-major) order; the
/// first vertex is the starting position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedBoard {
    pub vertices: Vec<(String, String)>,
    /// (from-vertex, label, to-vertex), grouped by source vertex and
    /// sorted by label within each group.
    pub edges: Vec<(String, String, String)>,
}

impl GeneratedBoard {
    /// Renders the board as explicit low-level node syntax.
    pub fn to_tokens(&self) -> Vec<Token> {
        use TokenKind::*;
        let mut out = Vec::new();
        for (name, piece) in &self.vertices {
            out.push(Token::synthetic(Ident, name));
            out.push(Token::synthetic(LBracket, "["));
            out.push(Token::synthetic(Ident, piece));
            out.push(Token::synthetic(RBracket, "]"));
            out.push(Token::synthetic(LBrace, "{"));
            let mut first = true;
            for (from, label, to) in &self.edges {
                if from != name {
                    continue;
                }
                if !first {
                    out.push(Token::synthetic(Comma, ","));
                }
                first = false;
                out.push(Token::synthetic(Ident, label));
                out.push(Token::synthetic(Colon, ":"));
                out.push(Token::synthetic(Ident, to));
            }
            out.push(Token::synthetic(RBrace, "}"));
        }
        out
    }
}

/// One cell of a generator argument: a piece name, or a hole.
pub type Cell = Option<String>;

fn vertex_name(coords: &[usize], wide: bool) -> String {
    let mut name = String::from("v");
    for (i, c) in coords.iter().enumerate() {
        if wide && i > 0 {
            name.push('_');
        }
        name.push_str(&c.to_string());
    }
    name
}

/// Builds edge lists from per-cell neighbor offsets, dropping edges whose
/// target is absent, then sorts each vertex's edges by label.
struct Builder {
    vertices: Vec<(String, String)>,
    edges: Vec<(String, String, String)>,
}

impl Builder {
    fn finish(mut self, span: Span) -> Result<GeneratedBoard, CompileError> {
        if self.vertices.is_empty() {
            return Err(CompileError::EmptyBoard(span));
        }
        self.edges.sort_by(|a, b| {
            let pos = |v: &(String, String, String)| {
                self.vertices.iter().position(|(n, _)| *n == v.0).unwrap()
            };
            (pos(a), &a.1).cmp(&(pos(b), &b.1))
        });
        Ok(GeneratedBoard { vertices: self.vertices, edges: self.edges })
    }
}

fn check_labels(labels: &[&str], span: Span) -> Result<(), CompileError> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(CompileError::DuplicateEdgeLabel { span, name: a.to_string() });
        }
    }
    Ok(())
}

/// A rectangular grid. `labels` are the up, down, left, right edge names;
/// all rows must have the same length. Names are `v<col><row>`, 0-based
/// from the top-left (`v<col>_<row>` once a coordinate exceeds 9).
pub fn generate_rectangle(
    labels: [&str; 4],
    rows: &[Vec<Cell>],
    span: Span,
) -> Result<GeneratedBoard, CompileError> {
    check_labels(&labels, span)?;
    let [up, down, left, right] = labels;
    let width = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != width) {
        return Err(CompileError::RaggedRows(span));
    }
    let wide = rows.len().max(width) > 10;
    let name = |c: usize, r: usize| vertex_name(&[c, r], wide);
    let present = |c: i64, r: i64| {
        (0..width as i64).contains(&c)
            && (0..rows.len() as i64).contains(&r)
            && rows[r as usize][c as usize].is_some()
    };
    let mut b = Builder { vertices: Vec::new(), edges: Vec::new() };
    for (r, row) in rows.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let Some(piece) = cell else { continue };
            b.vertices.push((name(c, r), piece.clone()));
            let neighbors =
                [(up, 0i64, -1i64), (down, 0, 1), (left, -1, 0), (right, 1, 0)];
            for (label, dc, dr) in neighbors {
                let (tc, tr) = (c as i64 + dc, r as i64 + dr);
                if present(tc, tr) {
                    b.edges.push((
                        name(c, r),
                        label.to_string(),
                        name(tc as usize, tr as usize),
                    ));
                }
            }
        }
    }
    b.finish(span)
}

/// A hexagonal grid. `labels` are the north-west, north-east, east,
/// south-east, south-west, west edge names. Row lengths must grow by one
/// up to a pivot row and then shrink by one.
pub fn generate_hexagon(
    labels: [&str; 6],
    rows: &[Vec<Cell>],
    span: Span,
) -> Result<GeneratedBoard, CompileError> {
    check_labels(&labels, span)?;
    let [nw, ne, east, se, sw, west] = labels;
    if rows.is_empty() {
        return Err(CompileError::EmptyBoard(span));
    }
    let mut growing = true;
    for w in rows.windows(2) {
        let (a, b) = (w[0].len() as i64, w[1].len() as i64);
        if growing && b == a + 1 {
            continue;
        }
        growing = false;
        if b != a - 1 {
            return Err(CompileError::InvalidHexShape(span));
        }
    }
    let wide = rows.iter().map(|r| r.len()).max().unwrap().max(rows.len()) > 10;
    let name = |c: usize, r: usize| vertex_name(&[c, r], wide);
    let present = |c: i64, r: i64| {
        (0..rows.len() as i64).contains(&r)
            && (0..rows[r as usize].len() as i64).contains(&c)
            && rows[r as usize][c as usize].is_some()
    };
    let mut b = Builder { vertices: Vec::new(), edges: Vec::new() };
    for (r, row) in rows.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let Some(piece) = cell else { continue };
            let c = c as i64;
            let r = r as i64;
            // Diagonal offsets depend on whether the adjacent row is the
            // longer or the shorter of the pair.
            let mut neighbors: Vec<(&str, i64, i64)> =
                vec![(east, c + 1, r), (west, c - 1, r)];
            if r + 1 < rows.len() as i64 {
                let (dsw, dse) = if rows[r as usize + 1].len() > row.len() {
                    (c, c + 1)
                } else {
                    (c - 1, c)
                };
                neighbors.push((sw, dsw, r + 1));
                neighbors.push((se, dse, r + 1));
            }
            if r > 0 {
                let (dnw, dne) = if rows[r as usize - 1].len() > row.len() {
                    (c, c + 1)
                } else {
                    (c - 1, c)
                };
                neighbors.push((nw, dnw, r - 1));
                neighbors.push((ne, dne, r - 1));
            }
            for (label, tc, tr) in neighbors {
                if present(tc, tr) {
                    b.edges.push((
                        name(c as usize, r as usize),
                        label.to_string(),
                        name(tc as usize, tr as usize),
                    ));
                }
            }
            b.vertices.push((name(c as usize, r as usize), piece.clone()));
        }
    }
    b.finish(span)
}

/// A stack of congruent rectangular layers. `labels` are the up, down,
/// left, right, front, back edge names; layer 0 is the back of the cuboid
/// and `front` points toward higher layer indices. Names are
/// `v<col><row><layer>`.
pub fn generate_cuboid(
    labels: [&str; 6],
    layers: &[Vec<Vec<Cell>>],
    span: Span,
) -> Result<GeneratedBoard, CompileError> {
    check_labels(&labels, span)?;
    let [up, down, left, right, front, back] = labels;
    if layers.is_empty() {
        return Err(CompileError::EmptyBoard(span));
    }
    let height = layers[0].len();
    let width = layers[0].first().map(|r| r.len()).unwrap_or(0);
    for layer in layers {
        if layer.len() != height {
            return Err(CompileError::RaggedLayers(span));
        }
        if layer.iter().any(|row| row.len() != width) {
            return Err(CompileError::RaggedRows(span));
        }
    }
    let wide = width.max(height).max(layers.len()) > 10;
    let name = |c: usize, r: usize, l: usize| vertex_name(&[c, r, l], wide);
    let present = |c: i64, r: i64, l: i64| {
        (0..layers.len() as i64).contains(&l)
            && (0..height as i64).contains(&r)
            && (0..width as i64).contains(&c)
            && layers[l as usize][r as usize][c as usize].is_some()
    };
    let mut b = Builder { vertices: Vec::new(), edges: Vec::new() };
    for (l, layer) in layers.iter().enumerate() {
        for (r, row) in layer.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                let Some(piece) = cell else { continue };
                b.vertices.push((name(c, r, l), piece.clone()));
                let neighbors = [
                    (up, 0i64, -1i64, 0i64),
                    (down, 0, 1, 0),
                    (left, -1, 0, 0),
                    (right, 1, 0, 0),
                    (front, 0, 0, 1),
                    (back, 0, 0, -1),
                ];
                for (label, dc, dr, dl) in neighbors {
                    let (tc, tr, tl) = (c as i64 + dc, r as i64 + dr, l as i64 + dl);
                    if present(tc, tr, tl) {
                        b.edges.push((
                            name(c, r, l),
                            label.to_string(),
                            name(tc as usize, tr as usize, tl as usize),
                        ));
                    }
                }
            }
        }
    }
    b.finish(span)
}

/// Parses a generator invocation starting at the generator keyword and
/// returns the instantiated board plus the index just past the closing `)`.
pub(crate) fn parse_generator(
    toks: &[Token],
    at: usize,
) -> Result<(GeneratedBoard, usize), CompileError> {
    let kw = &toks[at];
    let span = kw.span;
    let n_labels = match kw.kind {
        TokenKind::KwRectangle => 4,
        _ => 6,
    };
    let mut i = at + 1;
    expect(toks, &mut i, TokenKind::LParen, "`(`")?;
    let mut labels: Vec<String> = Vec::new();
    for _ in 0..n_labels {
        let t = get(toks, i)?;
        if t.kind != TokenKind::Ident {
            return Err(CompileError::SyntaxError {
                span: t.span,
                expected: "edge label".to_string(),
            });
        }
        labels.push(t.text.clone());
        i += 1;
        expect(toks, &mut i, TokenKind::Comma, "`,`")?;
    }
    let label_refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let board = match kw.kind {
        TokenKind::KwRectangle => {
            let rows = parse_rows(toks, &mut i)?;
            generate_rectangle(label_refs.as_slice().try_into().unwrap(), &rows, span)?
        }
        TokenKind::KwHexagon => {
            let rows = parse_rows(toks, &mut i)?;
            generate_hexagon(label_refs.as_slice().try_into().unwrap(), &rows, span)?
        }
        _ => {
            let mut layers = Vec::new();
            while get(toks, i)?.kind == TokenKind::LBracket {
                i += 1;
                layers.push(parse_rows(toks, &mut i)?);
                expect(toks, &mut i, TokenKind::RBracket, "`]` closing a layer")?;
            }
            generate_cuboid(label_refs.as_slice().try_into().unwrap(), &layers, span)?
        }
    };
    expect(toks, &mut i, TokenKind::RParen, "`)` closing the generator")?;
    Ok((board, i))
}

fn get(toks: &[Token], i: usize) -> Result<&Token, CompileError> {
    toks.get(i).ok_or_else(|| CompileError::SyntaxError {
        span: toks.last().map(|t| t.span).unwrap_or_default(),
        expected: "more generator input".to_string(),
    })
}

fn expect(
    toks: &[Token],
    i: &mut usize,
    kind: TokenKind,
    what: &str,
) -> Result<(), CompileError> {
    let t = get(toks, *i)?;
    if t.kind != kind {
        return Err(CompileError::SyntaxError { span: t.span, expected: what.to_string() });
    }
    *i += 1;
    Ok(())
}

/// Parses consecutive `[cell, cell, ...]` lines; stops before any token
/// that does not open a line.
fn parse_rows(toks: &[Token], i: &mut usize) -> Result<Vec<Vec<Cell>>, CompileError> {
    let mut rows = Vec::new();
    while get(toks, *i)?.kind == TokenKind::LBracket {
        *i += 1;
        let mut row: Vec<Cell> = Vec::new();
        let mut cell: Cell = None;
        loop {
            let t = get(toks, *i)?;
            match t.kind {
                TokenKind::Ident if cell.is_none() => cell = Some(t.text.clone()),
                TokenKind::Comma => row.push(cell.take()),
                TokenKind::RBracket => {
                    row.push(cell.take());
                    *i += 1;
                    break;
                }
                _ => {
                    return Err(CompileError::SyntaxError {
                        span: t.span,
                        expected: "piece name, `,`, or `]`".to_string(),
                    })
                }
            }
            *i += 1;
        }
        rows.push(row);
    }
    Ok(rows)
}
