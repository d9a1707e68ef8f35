//! Greedy longest-match tokenization shared by both language levels.
//!
//! Comments (`//` and `/* */`) and whitespace separate tokens and are
//! discarded. Keywords are case-sensitive. `/* */` comments do not nest.

use crate::error::{CompileError, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Nat,
    LParen,
    RParen,
    LBrace,
    RBrace,
    OnCheck,     // `{?`
    OnCheckNeg,  // `{!`
    LBraceVar,   // `{$`
    LBracket,
    LBracketVar, // `[$`
    RBracket,
    Tilde,
    Hash,
    Minus,
    Plus,
    Caret,
    Slash,
    Star,
    Comma,
    Semicolon,
    Colon,
    Dollar,
    Equals,
    Arrow,       // `->`
    DoubleArrow, // `->>`
    Bang,
    Question,
    NotEqual,
    EqEq,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    KwPlayers,
    KwPieces,
    KwVariables,
    KwRules,
    KwBoard,
    KwHexagon,
    KwRectangle,
    KwCuboid,
}

impl TokenKind {
    /// True for `players`, `pieces`, `variables`, `rules`, `board`.
    pub fn is_section_keyword(self) -> bool {
        matches!(
            self,
            TokenKind::KwPlayers
                | TokenKind::KwPieces
                | TokenKind::KwVariables
                | TokenKind::KwRules
                | TokenKind::KwBoard
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn synthetic(kind: TokenKind, text: &str) -> Self {
        Token { kind, text: text.to_string(), span: Span::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub source_name: String,
}

impl TokenStream {
    /// Token texts joined by single spaces; re-lexing this yields an
    /// identical kind/text sequence.
    pub fn render(&self) -> String {
        let texts: Vec<&str> = self.tokens.iter().map(|t| t.text.as_str()).collect();
        texts.join(" ")
    }
}

fn keyword_kind(text: &str) -> Option<TokenKind> {
    Some(match text {
        "players" => TokenKind::KwPlayers,
        "pieces" => TokenKind::KwPieces,
        "variables" => TokenKind::KwVariables,
        "rules" => TokenKind::KwRules,
        "board" => TokenKind::KwBoard,
        "hexagon" => TokenKind::KwHexagon,
        "rectangle" => TokenKind::KwRectangle,
        "cuboid" => TokenKind::KwCuboid,
        _ => return None,
    })
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str) -> Self {
        Lexer { bytes: source.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn span(&self, start: usize, start_line: u32, start_col: u32) -> Span {
        Span::new(start_line, start_col, start, self.pos - start)
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.bytes.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    /// Skips whitespace and comments; errors on an unclosed `/*`.
    fn skip_trivia(&mut self) -> Result<(), CompileError> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.peek2() == Some(b'/') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'/') if self.peek2() == Some(b'*') => {
                    let (start, line, col) = (self.pos, self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            Some(b'*') if self.peek2() == Some(b'/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(_) => {
                                self.bump();
                            }
                            None => {
                                return Err(CompileError::UnterminatedComment(Span::new(
                                    line, col, start, 2,
                                )));
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, CompileError> {
        self.skip_trivia()?;
        let (start, line, col) = (self.pos, self.line, self.col);
        let b = match self.peek() {
            Some(b) => b,
            None => return Ok(None),
        };

        if b.is_ascii_alphabetic() {
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
                self.bump();
            }
            let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap().to_string();
            let kind = keyword_kind(&text).unwrap_or(TokenKind::Ident);
            return Ok(Some(Token { kind, text, span: self.span(start, line, col) }));
        }
        if b.is_ascii_digit() {
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap().to_string();
            return Ok(Some(Token { kind: TokenKind::Nat, text, span: self.span(start, line, col) }));
        }

        // Punctuation, longest match first.
        let rest = &self.bytes[self.pos..];
        let table: &[(&[u8], TokenKind)] = &[
            (b"->>", TokenKind::DoubleArrow),
            (b"->", TokenKind::Arrow),
            (b"{?", TokenKind::OnCheck),
            (b"{!", TokenKind::OnCheckNeg),
            (b"{$", TokenKind::LBraceVar),
            (b"[$", TokenKind::LBracketVar),
            (b"!=", TokenKind::NotEqual),
            (b"==", TokenKind::EqEq),
            (b"<=", TokenKind::LessEq),
            (b">=", TokenKind::GreaterEq),
            (b"(", TokenKind::LParen),
            (b")", TokenKind::RParen),
            (b"{", TokenKind::LBrace),
            (b"}", TokenKind::RBrace),
            (b"[", TokenKind::LBracket),
            (b"]", TokenKind::RBracket),
            (b"~", TokenKind::Tilde),
            (b"#", TokenKind::Hash),
            (b"-", TokenKind::Minus),
            (b"+", TokenKind::Plus),
            (b"^", TokenKind::Caret),
            (b"/", TokenKind::Slash),
            (b"*", TokenKind::Star),
            (b",", TokenKind::Comma),
            (b";", TokenKind::Semicolon),
            (b":", TokenKind::Colon),
            (b"$", TokenKind::Dollar),
            (b"=", TokenKind::Equals),
            (b"!", TokenKind::Bang),
            (b"?", TokenKind::Question),
            (b"<", TokenKind::Less),
            (b">", TokenKind::Greater),
        ];
        for (pat, kind) in table {
            if rest.starts_with(pat) {
                for _ in 0..pat.len() {
                    self.bump();
                }
                let text = std::str::from_utf8(pat).unwrap().to_string();
                return Ok(Some(Token { kind: *kind, text, span: self.span(start, line, col) }));
            }
        }
        Err(CompileError::UnexpectedCharacter(Span::new(line, col, start, 1)))
    }
}

/// Tokenizes a full description, dropping whitespace and comments.
pub fn tokenize(source: &str) -> Result<TokenStream, CompileError> {
    tokenize_named(source, "<input>")
}

pub fn tokenize_named(source: &str, source_name: &str) -> Result<TokenStream, CompileError> {
    let mut lexer = Lexer::new(source);
    let mut tokens = Vec::new();
    while let Some(token) = lexer.next_token()? {
        tokens.push(token);
    }
    Ok(TokenStream { tokens, source_name: source_name.to_string() })
}

/// Re-lexes a pasted text; succeeds only if it forms exactly one token.
pub fn lex_single_token(text: &str) -> Option<Token> {
    let stream = tokenize(text).ok()?;
    match stream.tokens.len() {
        1 => Some(stream.tokens.into_iter().next().unwrap()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().tokens.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn double_arrow_is_one_token() {
        assert_eq!(kinds("->>"), vec![TokenKind::DoubleArrow]);
    }

    #[test]
    fn comment_splits_tokens() {
        assert_eq!(kinds("->/**/>"), vec![TokenKind::Arrow, TokenKind::Greater]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().tokens.is_empty());
    }

    #[test]
    fn brace_question_is_one_token_but_spaced_is_two() {
        assert_eq!(kinds("{?"), vec![TokenKind::OnCheck]);
        assert_eq!(kinds("{ ?"), vec![TokenKind::LBrace, TokenKind::Question]);
    }

    #[test]
    fn eq_bang_lexes_as_two_tokens() {
        // `=!` is not in the token table; maximal munch yields `=` then `!`.
        assert_eq!(kinds("=!"), vec![TokenKind::Equals, TokenKind::Bang]);
        assert_eq!(kinds("!="), vec![TokenKind::NotEqual]);
    }

    #[test]
    fn keywords_are_case_sensitive() {
        assert_eq!(kinds("board Board"), vec![TokenKind::KwBoard, TokenKind::Ident]);
    }

    #[test]
    fn line_comment_and_spans() {
        let stream = tokenize("ab // c\n12").unwrap();
        assert_eq!(stream.tokens.len(), 2);
        assert_eq!(stream.tokens[0].span.line, 1);
        assert_eq!(stream.tokens[1].span.line, 2);
        assert_eq!(stream.tokens[1].span.column, 1);
    }

    #[test]
    fn unterminated_comment() {
        assert!(matches!(tokenize("x /* y"), Err(CompileError::UnterminatedComment(_))));
    }

    #[test]
    fn unexpected_character() {
        assert!(matches!(tokenize("x @ y"), Err(CompileError::UnexpectedCharacter(_))));
    }

    #[test]
    fn comments_do_not_nest() {
        // C semantics: the first `*/` closes the comment.
        assert_eq!(kinds("/* /* */ x"), vec![TokenKind::Ident]);
    }

    #[test]
    fn render_round_trip() {
        let src = "#rules = ->white ({w}[e] up)* ->> {$ x <= 10}";
        let stream = tokenize(src).unwrap();
        let again = tokenize(&stream.render()).unwrap();
        let a: Vec<_> = stream.tokens.iter().map(|t| (t.kind, t.text.clone())).collect();
        let b: Vec<_> = again.tokens.iter().map(|t| (t.kind, t.text.clone())).collect();
        assert_eq!(a, b);
    }
}
