//! Golden tests for the high-level → low-level compiler output.

use rbg::hl::compile_hl_to_ll;
use rbg::lexer::{tokenize, tokenize_named, TokenKind};
use rbg::printer::print_canonical;

fn read_game(name: &str) -> String {
    let path = format!("{}/../../games/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn lower(src: &str) -> String {
    let toks = tokenize(src).unwrap();
    print_canonical(&compile_hl_to_ll(&toks).unwrap()).unwrap()
}

fn kinds_and_texts(src: &str) -> Vec<(TokenKind, String)> {
    tokenize(src)
        .unwrap()
        .tokens
        .into_iter()
        .map(|t| (t.kind, t.text))
        .collect()
}

/// The white half-turn of the lowered breakthrough rules, as quoted in
/// the overview of the macro unrolling (with the player reference made
/// concrete).
const UNROLLED_WHITE_TURN: &str = "\
    ((up*+down*)(left*+right*)) {w} [e] up \
    ({e} + (left+right) {e,b}) ->> \
    [w][$white=100][$black=0] ({!up} ->> {} + {?up} ->black)";

#[test]
fn breakthrough_unrolls_to_the_quoted_fragment() {
    let lowered = lower(&read_game("breakthrough.rbg"));
    let rules = lowered
        .lines()
        .skip_while(|l| !l.starts_with("#rules"))
        .nth(1)
        .expect("rules body line");

    let golden = kinds_and_texts(UNROLLED_WHITE_TURN);
    let body = kinds_and_texts(rules);
    let found = body.windows(golden.len()).any(|w| w == golden.as_slice());
    assert!(found, "expansion of the white turn does not match the quoted fragment");
}

#[test]
fn lowering_is_idempotent_on_the_whole_corpus() {
    for name in [
        "breakthrough.rbg",
        "breakthrough3x3.rbg",
        "tic_tac_toe.rbg",
        "connect_four.rbg",
        "keeper_nondet.rbg",
    ] {
        let once = lower(&read_game(name));
        assert_eq!(lower(&once), once, "{name} does not reach a fixed point");
    }
}

/// The macro-organized breakthrough rules from the language reference
/// expand to exactly the hand-written low-level rules of the 3×3 game.
#[test]
fn macro_organized_rules_match_the_handwritten_ll() {
    let explicit = read_game("breakthrough3x3.rbg");
    let board: String = explicit
        .lines()
        .skip_while(|l| !l.starts_with("#board"))
        .take_while(|l| !l.starts_with("#rules"))
        .collect::<Vec<_>>()
        .join("\n");

    let organized = format!(
        "#players = white (1), black (1)
         #pieces = whitePawn, blackPawn, empty
         #variables =
         {board}
         #anySquare = (up* + down*)(left* + right*)
         #pickUpPiece(color) = {{color~Pawn}}[empty]
         #basicMove(color;oppositeColor;forwardDirection) =
             pickUpPiece(color)
             (
                 forwardDirection left {{empty, oppositeColor~Pawn}}
               + forwardDirection {{empty}}
               + forwardDirection right {{empty, oppositeColor~Pawn}}
             )[color~Pawn]
         #endGame = ->>{{}}
         #checkForWin(color;oppositeColor;forwardDirection) =
             [$ color=1][$ oppositeColor=0]
             (
                 {{! forwardDirection}} endGame
               + {{? forwardDirection}}->oppositeColor
             )
         #fullMove(color;oppositeColor;forwardDirection)=
             anySquare
             basicMove(color;oppositeColor;forwardDirection)
             checkForWin(color;oppositeColor;forwardDirection)
         #rules = ->white
             (
                 fullMove(white;black;up)
                 fullMove(black;white;down)
             )*"
    );

    assert_eq!(lower(&organized), lower(&explicit));
}

/// The small hexagon expands to the reference graph, edge for edge.
#[test]
fn hexagon_232_matches_reference_graph() {
    let generated = "
        #players = p(1)
        #pieces = e
        #variables =
        #board = hexagon(northWest, northEast, east, southEast, southWest, west,
            [e, e]
            [e, e, e]
            [e, e])
        #rules = ->p";
    let reference = "
        #players = p(1)
        #pieces = e
        #variables =
        #board =
            v00[e]{east:v10,southEast:v11,southWest:v01}
            v10[e]{southEast:v21,southWest:v11,west:v00}
            v01[e]{east:v11,northEast:v00,southEast:v02}
            v11[e]{east:v21,northEast:v10,northWest:v00,southEast:v12,southWest:v02,west:v01}
            v21[e]{northWest:v10,southWest:v12,west:v11}
            v02[e]{east:v12,northEast:v11,northWest:v01}
            v12[e]{northEast:v21,northWest:v11,west:v02}
        #rules = ->p";

    let a = rbg::parser::parse_description(
        &compile_hl_to_ll(&tokenize_named(generated, "generated").unwrap()).unwrap(),
    )
    .unwrap();
    let b = rbg::parser::parse_description(&tokenize_named(reference, "reference").unwrap())
        .unwrap();

    assert_eq!(a.board.vertex_names, b.board.vertex_names);
    let edges = |d: &rbg::ast::AbstractDescription| -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        for v in 0..d.board.vertex_count() {
            for (di, dir) in d.board.dirs.iter().enumerate() {
                if let Some(t) = d.board.target(v, di) {
                    out.push((
                        d.board.vertex_names[v].clone(),
                        dir.clone(),
                        d.board.vertex_names[t].clone(),
                    ));
                }
            }
        }
        out.sort();
        out
    };
    assert_eq!(edges(&a), edges(&b));
}
