//! Thin command-line front end over the library: perft and flat
//! Monte-Carlo benchmarks, HL→LL compilation, validation, and random
//! play transcripts.
//!
//! Exit codes: 0 success, 1 usage, 2 parse/validation error, 3 runtime
//! (cap, keeper) error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rbg::analyzer::{recommended_cap, validate};
use rbg::error::{EngineError, Severity};
use rbg::hl::compile_hl_to_ll;
use rbg::lexer::tokenize_named;
use rbg::printer::print_canonical;
use rbg::reasoner::Reasoner;
use rbg::Game;

/// Published interpreter throughput for breakthrough, printed for
/// comparison next to measured numbers.
const REFERENCE_NODES_PER_SECOND: u64 = 5_113_725;

#[derive(Parser)]
#[command(name = "rbg", version, about = "Regular Boardgames toolchain")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count the game tree to a fixed depth.
    Perft {
        file: PathBuf,
        #[arg(long)]
        depth: u32,
        /// Split the root moves over N worker threads.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Emit a newline-delimited JSON record instead of a table.
        #[arg(long)]
        json: bool,
        /// Override the straightness cap (env RBG_CAP is the fallback).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Flat Monte Carlo: uniformly random playouts from the root.
    Mc {
        file: PathBuf,
        #[arg(long)]
        playouts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Stop a playout after this many player moves.
        #[arg(long, default_value_t = 1000)]
        max_plies: usize,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Lower a high-level description and print the canonical low-level
    /// text.
    Compile {
        file: PathBuf,
        /// Print the abstract description as JSON instead.
        #[arg(long)]
        dump_json: bool,
        /// Print the rules automaton in Graphviz DOT format instead.
        #[arg(long)]
        dump_nfa: bool,
    },
    /// Print analyzer diagnostics; exit 2 if any is an error.
    Validate {
        file: PathBuf,
        /// Additionally verify that keeper completion from the root is
        /// unique.
        #[arg(long)]
        debug_keeper: bool,
    },
    /// Play one random game, printing every move and board.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        max_plies: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Serialize)]
struct BenchRecord {
    game: String,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    playouts: Option<u64>,
    nodes: u64,
    elapsed_ms: f64,
    nodes_per_second: u64,
    cap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are successes, anything else is
            // a usage error.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn run(cli: Cli) -> Result<(), u8> {
    match cli.cmd {
        Cmd::Perft { file, depth, threads, json, cap } => {
            let (game, name) = load_game(&file, true)?;
            let cap = resolve_cap(&game, cap);
            cmd_perft(&game, &name, depth, threads.max(1), json, cap)
        }
        Cmd::Mc { file, playouts, seed, threads, max_plies, json, cap } => {
            let (game, name) = load_game(&file, true)?;
            let cap = resolve_cap(&game, cap);
            cmd_mc(&game, &name, playouts, seed, threads.max(1), max_plies, json, cap)
        }
        Cmd::Compile { file, dump_json, dump_nfa } => cmd_compile(&file, dump_json, dump_nfa),
        Cmd::Validate { file, debug_keeper } => cmd_validate(&file, debug_keeper),
        Cmd::Simulate { file, seed, max_plies, cap } => {
            let (game, name) = load_game(&file, true)?;
            let cap = resolve_cap(&game, cap);
            cmd_simulate(&game, &name, seed, max_plies, cap)
        }
    }
}

fn read_source(file: &PathBuf) -> Result<(String, String), u8> {
    let name = file
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| file.display().to_string());
    match std::fs::read_to_string(file) {
        Ok(src) => Ok((src, name)),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            Err(2)
        }
    }
}

/// Loads and compiles a game; with `strict`, refuses descriptions with
/// error-level diagnostics.
fn load_game(file: &PathBuf, strict: bool) -> Result<(Game, String), u8> {
    let (src, name) = read_source(file)?;
    let game = Game::compile_named(&src, &name).map_err(|e| {
        eprintln!("error: {e}");
        2u8
    })?;
    if strict {
        let mut bad = false;
        for d in validate(&game.desc) {
            if d.severity == Severity::Error {
                eprintln!("{d}");
                bad = true;
            }
        }
        if bad {
            return Err(2);
        }
    }
    Ok((game, name))
}

fn resolve_cap(game: &Game, flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("RBG_CAP").ok().and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| recommended_cap(&game.desc))
}

fn runtime_err(e: EngineError) -> u8 {
    eprintln!("error: {e}");
    3
}

/// Exhaustive tree walk counting positions at the horizon; also counts
/// every node entered and every move applied, to assert the structural
/// identity nodes = moves + 1.
fn perft_counted(
    r: &mut Reasoner,
    state: &mut rbg::state::GameState,
    depth: u32,
    nodes: &mut u64,
    applied: &mut u64,
) -> Result<u64, EngineError> {
    let undos = r.complete_keeper(state)?;
    *nodes += 1;
    let result = (|| {
        if depth == 0 {
            return Ok(1);
        }
        let moves = r.legal_moves(state)?;
        let mut total = 0u64;
        for mv in &moves {
            let u = r.apply_move(state, mv)?;
            *applied += 1;
            let sub = perft_counted(r, state, depth - 1, nodes, applied);
            r.undo_move(state, u);
            total += sub?;
        }
        Ok(total)
    })();
    r.undo_completion(state, undos);
    result
}

fn cmd_perft(
    game: &Game,
    name: &str,
    depth: u32,
    threads: usize,
    json: bool,
    cap: usize,
) -> Result<(), u8> {
    let start = Instant::now();
    let leaves = if threads <= 1 || depth == 0 {
        let mut r = Reasoner::with_cap(game, cap);
        let mut s = game.initial_state();
        let mut nodes = 0u64;
        let mut applied = 0u64;
        let leaves =
            perft_counted(&mut r, &mut s, depth, &mut nodes, &mut applied)
                .map_err(runtime_err)?;
        assert_eq!(nodes, applied + 1, "every node but the root is entered by one move");
        leaves
    } else {
        parallel_perft(game, depth, threads, cap).map_err(runtime_err)?
    };
    let elapsed = start.elapsed();
    let record = BenchRecord {
        game: name.to_string(),
        command: "perft",
        depth: Some(depth),
        playouts: None,
        nodes: leaves,
        elapsed_ms: elapsed.as_secs_f64() * 1000.0,
        nodes_per_second: rate(leaves, elapsed.as_secs_f64()),
        cap,
        seed: None,
    };
    if json {
        println!("{}", serde_json::to_string(&record).unwrap());
    } else {
        println!("perft {name} depth {depth}");
        println!("  perft({depth}) = {leaves} nodes");
        println!(
            "  elapsed {:.3} ms, {} nodes/s (published interpreter: {} nodes/s), cap {}",
            record.elapsed_ms, record.nodes_per_second, REFERENCE_NODES_PER_SECOND, cap
        );
    }
    Ok(())
}

fn parallel_perft(
    game: &Game,
    depth: u32,
    threads: usize,
    cap: usize,
) -> Result<u64, EngineError> {
    // Partition the root moves; each worker replays its share on an
    // independent state copy.
    let mut r = Reasoner::with_cap(game, cap);
    let mut root = game.initial_state();
    let undos = r.complete_keeper(&mut root)?;
    let moves = r.legal_moves(&mut root)?;
    r.undo_completion(&mut root, undos.into_iter().collect());

    let mut base = game.initial_state();
    let base_undos = r.complete_keeper(&mut base)?;
    drop(base_undos); // the copy is discarded afterwards, no need to undo

    let results: Vec<Result<u64, EngineError>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for t in 0..threads {
            let moves = &moves;
            let base = &base;
            handles.push(scope.spawn(move || {
                let mut worker = Reasoner::with_cap(game, cap);
                let mut total = 0u64;
                for mv in moves.iter().skip(t).step_by(threads) {
                    let mut s = base.clone();
                    worker.apply_move(&mut s, mv)?;
                    total += worker.perft(&mut s, depth - 1)?;
                }
                Ok(total)
            }));
        }
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut total = 0;
    for r in results {
        total += r?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    game: &Game,
    name: &str,
    playouts: u64,
    seed: u64,
    threads: usize,
    max_plies: usize,
    json: bool,
    cap: usize,
) -> Result<(), u8> {
    let start = Instant::now();
    let chunks: Vec<Result<(u64, Vec<(String, i64, i64, i64)>, u64), EngineError>> =
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..threads {
                handles.push(scope.spawn(move || {
                    let mut r = Reasoner::with_cap(game, cap);
                    let mut moves_made = 0u64;
                    let mut finished = 0u64;
                    // (name, total, min, max) per player.
                    let mut totals: Vec<(String, i64, i64, i64)> = game
                        .desc
                        .players
                        .iter()
                        .map(|(n, _)| (n.clone(), 0, i64::MAX, i64::MIN))
                        .collect();
                    for i in ((t as u64)..playouts).step_by(threads) {
                        // One independent stream per playout, so results
                        // do not depend on the thread layout.
                        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
                        let mut s = game.initial_state();
                        let end = r.random_playout(&mut s, &mut rng, max_plies)?;
                        moves_made += end.plies as u64;
                        if !end.truncated {
                            finished += 1;
                        }
                        for (k, (_, score)) in end.scores.iter().enumerate() {
                            totals[k].1 += score;
                            totals[k].2 = totals[k].2.min(*score);
                            totals[k].3 = totals[k].3.max(*score);
                        }
                    }
                    Ok((moves_made, totals, finished))
                }));
            }
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });

    let mut nodes = 0u64;
    let mut finished = 0u64;
    let mut totals: Vec<(String, i64, i64, i64)> = game
        .desc
        .players
        .iter()
        .map(|(n, _)| (n.clone(), 0, i64::MAX, i64::MIN))
        .collect();
    for chunk in chunks {
        let (m, t, f) = chunk.map_err(runtime_err)?;
        nodes += m;
        finished += f;
        for (k, (_, sum, lo, hi)) in t.into_iter().enumerate() {
            totals[k].1 += sum;
            totals[k].2 = totals[k].2.min(lo);
            totals[k].3 = totals[k].3.max(hi);
        }
    }
    let elapsed = start.elapsed();
    let record = BenchRecord {
        game: name.to_string(),
        command: "mc",
        depth: None,
        playouts: Some(playouts),
        nodes,
        elapsed_ms: elapsed.as_secs_f64() * 1000.0,
        nodes_per_second: rate(nodes, elapsed.as_secs_f64()),
        cap,
        seed: Some(seed),
    };
    if json {
        println!("{}", serde_json::to_string(&record).unwrap());
    } else {
        println!("mc {name}: {playouts} playouts, seed {seed}");
        println!("  {finished} finished, {nodes} moves made");
        for (player, sum, lo, hi) in &totals {
            if playouts > 0 {
                println!(
                    "  {player}: mean score {:.2}, min {lo}, max {hi}",
                    *sum as f64 / playouts as f64
                );
            }
        }
        println!(
            "  elapsed {:.3} ms, {} moves/s, cap {}",
            record.elapsed_ms, record.nodes_per_second, cap
        );
    }
    Ok(())
}

fn cmd_compile(file: &PathBuf, dump_json: bool, dump_nfa: bool) -> Result<(), u8> {
    let (src, name) = read_source(file)?;
    if dump_json || dump_nfa {
        let game = Game::compile_named(&src, &name).map_err(|e| {
            eprintln!("error: {e}");
            2u8
        })?;
        if dump_json {
            println!("{}", serde_json::to_string_pretty(&game.desc).unwrap());
        }
        if dump_nfa {
            print!("{}", game.automaton.main.to_dot(&game.indexed, "rules"));
            for (idx, nfa) in &game.automaton.patterns {
                print!("{}", nfa.to_dot(&game.indexed, &format!("pattern_{idx}")));
            }
        }
        return Ok(());
    }
    let lowered = tokenize_named(&src, &name)
        .and_then(|toks| compile_hl_to_ll(&toks))
        .and_then(|ll| print_canonical(&ll))
        .map_err(|e| {
            eprintln!("error: {e}");
            2u8
        })?;
    print!("{lowered}");
    Ok(())
}

fn cmd_validate(file: &PathBuf, debug_keeper: bool) -> Result<(), u8> {
    let (game, _) = load_game(file, false)?;
    let diags = validate(&game.desc);
    let mut worst = 0u8;
    for d in &diags {
        println!("{d}");
        if d.severity == Severity::Error {
            worst = 2;
        }
    }
    if worst == 0 && debug_keeper {
        let mut r = Reasoner::new(&game);
        r.set_debug_keeper(true);
        let mut s = game.initial_state();
        if let Err(e) = r.complete_keeper(&mut s) {
            eprintln!("error: {e}");
            return Err(3);
        }
        println!("INFO KeeperDeterminism: root keeper completion is unique");
    }
    if worst != 0 {
        return Err(worst);
    }
    Ok(())
}

fn cmd_simulate(
    game: &Game,
    name: &str,
    seed: u64,
    max_plies: usize,
    cap: usize,
) -> Result<(), u8> {
    let mut r = Reasoner::with_cap(game, cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = game.initial_state();
    println!("simulate {name}, seed {seed}");
    let mut ply = 0;
    loop {
        r.complete_keeper(&mut s).map_err(runtime_err)?;
        let moves = r.legal_moves(&mut s).map_err(runtime_err)?;
        if moves.is_empty() || ply >= max_plies {
            break;
        }
        let mv = moves[rand::Rng::gen_range(&mut rng, 0..moves.len())].clone();
        let player = s
            .semi
            .current_player
            .map(|p| game.desc.player_name(p).to_string())
            .unwrap_or_else(|| "keeper".to_string());
        let shown: Vec<String> = mv
            .iter()
            .map(|&(idx, v)| format!("({idx}, {})", game.desc.board.vertex_names[v]))
            .collect();
        r.apply_move(&mut s, &mv).map_err(runtime_err)?;
        ply += 1;
        println!("ply {ply} ({player}): {}", shown.join(" "));
        print_board(game, &s);
    }
    println!("final scores:");
    for (player, score) in s.semi.scores(&game.desc) {
        println!("  {player}: {score}");
    }
    Ok(())
}

fn print_board(game: &Game, s: &rbg::state::GameState) {
    let names = &game.desc.board.vertex_names;
    let mut line = String::from(" ");
    for (v, name) in names.iter().enumerate() {
        line.push_str(&format!(" {name}:{}", game.desc.pieces[s.semi.piece_at(v)]));
        if (v + 1) % 8 == 0 {
            println!("{line}");
            line = String::from(" ");
        }
    }
    if line.trim() != "" {
        println!("{line}");
    }
}

fn rate(nodes: u64, secs: f64) -> u64 {
    if secs > 0.0 {
        (nodes as f64 / secs) as u64
    } else {
        0
    }
}
