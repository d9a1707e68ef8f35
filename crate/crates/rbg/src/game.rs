//! A compiled game: the abstract description together with the indexed
//! rules and their automaton, ready to play.

use crate::ast::{index_rules, AbstractDescription, IndexedRules};
use crate::error::CompileError;
use crate::hl::compile_hl_to_ll;
use crate::lexer::{tokenize_named, TokenStream};
use crate::nfa::{build_automaton, RulesAutomaton};
use crate::parser::parse_description;
use crate::state::{GameState, SemiState};

pub struct Game {
    pub desc: AbstractDescription,
    pub indexed: IndexedRules,
    pub automaton: RulesAutomaton,
}

impl Game {
    /// Compiles a (high- or low-level) source text down to a playable game.
    pub fn compile(source: &str) -> Result<Game, CompileError> {
        Game::compile_named(source, "<input>")
    }

    pub fn compile_named(source: &str, name: &str) -> Result<Game, CompileError> {
        let hl = tokenize_named(source, name)?;
        let ll = compile_hl_to_ll(&hl)?;
        Game::from_ll(&ll)
    }

    /// Builds a game from an already lowered token stream.
    pub fn from_ll(ll: &TokenStream) -> Result<Game, CompileError> {
        let desc = parse_description(ll)?;
        Ok(Game::from_description(desc))
    }

    pub fn from_description(desc: AbstractDescription) -> Game {
        let indexed = index_rules(&desc.rules);
        let automaton = build_automaton(&indexed);
        Game { desc, indexed, automaton }
    }

    /// The initial state: keeper to move, rules index 0.
    pub fn initial_state(&self) -> GameState {
        GameState { semi: SemiState::initial(&self.desc), rules_index: 0 }
    }
}
