//! Shared error and diagnostic types.

use std::fmt;

/// A location in the source text: line and column are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    pub offset: usize,
    pub len: usize,
}

impl Span {
    pub fn new(line: u32, column: u32, offset: usize, len: usize) -> Self {
        Span { line, column, offset, len }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Errors raised while turning source text into an abstract description.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CompileError {
    #[error("unexpected character at {0}")]
    UnexpectedCharacter(Span),
    #[error("unterminated comment starting at {0}")]
    UnterminatedComment(Span),
    #[error("pasted text {text:?} is not a single valid token (at {span})")]
    InvalidPaste { span: Span, text: String },
    #[error("macro {name:?} used with {given} argument(s), no matching definition (at {span})")]
    ArityMismatch { span: Span, name: String, given: usize },
    #[error("duplicate macro definition {name:?} (at {span})")]
    DuplicateMacro { span: Span, name: String },
    #[error("macro expansion exceeded depth limit {limit}")]
    RecursiveExpansionLimit { limit: usize },
    #[error("board rows have unequal lengths (at {0})")]
    RaggedRows(Span),
    #[error("board layers have unequal shapes (at {0})")]
    RaggedLayers(Span),
    #[error("board has no vertices (at {0})")]
    EmptyBoard(Span),
    #[error("row lengths do not form a hexagon (at {0})")]
    InvalidHexShape(Span),
    #[error("power of zero is not allowed (at {0})")]
    ZeroPower(Span),
    #[error("piece choices and assignments cannot be mixed in one bracket (at {0})")]
    MixedCommaList(Span),
    #[error("missing section #{0}")]
    MissingSection(&'static str),
    #[error("duplicate section #{name} (at {span})")]
    DuplicateSection { span: Span, name: &'static str },
    #[error("undeclared identifier {name:?} (at {span})")]
    UndeclaredIdentifier { span: Span, name: String },
    #[error("identifier {name:?} declared in more than one namespace (at {span})")]
    DisjointnessViolation { span: Span, name: String },
    #[error("duplicate edge label {name:?} on one vertex (at {span})")]
    DuplicateEdgeLabel { span: Span, name: String },
    #[error("syntax error at {span}: expected {expected}")]
    SyntaxError { span: Span, expected: String },
}

/// Errors raised by the move engine at run time.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("straightness cap {0} exceeded; the description is improper or the cap is too low")]
    StraightnessCapExceeded(usize),
    #[error("keeper completion is not unique")]
    KeeperNondeterminism,
    #[error("keeper completion did not terminate within {0} moves")]
    KeeperRunaway(usize),
    #[error("move replay hit an invalid modifier application")]
    IllegalMove,
}

/// Severity of an analyzer diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Info => write!(f, "INFO"),
            Severity::Warning => write!(f, "WARNING"),
            Severity::Error => write!(f, "ERROR"),
        }
    }
}

/// A machine-parsable analyzer diagnostic: `LEVEL code: message (line:col)`.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Option<Span>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.severity, self.code, self.message)?;
        if let Some(span) = self.span {
            write!(f, " ({span})")?;
        }
        Ok(())
    }
}
