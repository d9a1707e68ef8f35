//! A toolchain for the Regular Boardgames description language.
//!
//! The language describes finite deterministic turn-based games with full
//! information. A description names the players, pieces, bounded numeric
//! variables, and a directed board graph with labelled edges, and gives the
//! rules as a regular expression over primitive actions. This crate
//! compiles the human-oriented level (macros, board generators, sugar) down
//! to the machine-oriented core, parses and validates the core, and plays
//! games with a move generator built on a nondeterministic finite automaton
//! over the rules expression.

pub mod analyzer;
pub mod ast;
pub mod error;
pub mod game;
pub mod hl;
pub mod lexer;
pub mod nfa;
pub mod oracle;
pub mod parser;
pub mod printer;
pub mod reasoner;
pub mod state;

pub use error::{CompileError, Diagnostic, EngineError, Severity, Span};
pub use game::Game;
pub use reasoner::{Move, Reasoner};
