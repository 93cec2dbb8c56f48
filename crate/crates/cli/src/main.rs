mod report;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ktlive::corpus::{random_corpus, CorpusParams};
use ktlive::game::{complete, parse_game, serialize_game, solve_parity, validate, Action, GameGraph, Player};
use ktlive::liveness::{check_k_live, LiveOptions, LivenessReport, Verdict, DEFAULT_CAP};
use ktlive::product::ProductGame;
use ktlive::reductions::{cnf_to_game, parse_dimacs, parse_qdimacs, qbf_to_game, robot_scenario};
use ktlive::synthesis::{
    simulate, solve_bounded, steps_bound, Bounded, BoundedOptions, Controller, ControllerOptions, SynthesisError,
    DEFAULT_POSITION_CAP,
};
use ktlive::transducer::{
    count, is_canonical, parse_transducer, serialize_transducer, Enumeration, Transducer, TransducerDoc,
};

use report::{InputRecord, Outcome, RunReport};

const EXIT_IO: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "ktlive", version, about = "Games against environments with at most k states")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Global {
    /// Worker threads for enumeration sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for the random game generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest number of machines any sweep may examine.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Write a JSON run report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json_report: Option<PathBuf>,
    /// Make reports independent of timing and thread scheduling.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game document; prints one VIOLATION line per problem.
    Validate {
        /// Game file, `-` or absent for stdin.
        input: Option<String>,
    },
    /// Make a game total by routing missing moves to paradise vertices.
    Complete {
        input: Option<String>,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Build the product of a game with a transducer.
    Product {
        input: Option<String>,
        #[arg(short, long)]
        transducer: String,
        /// Include every (vertex, state) pair, not only reachable ones.
        #[arg(long)]
        full: bool,
        #[arg(short, long)]
        output: Option<String>,
        /// Write a winning lasso from the initial position to this path.
        #[arg(long, value_name = "PATH")]
        lasso: Option<String>,
    },
    /// Decide k-transducer liveness by enumerating every k-state machine.
    CheckLive {
        input: Option<String>,
        #[arg(short)]
        k: usize,
        /// Only examine one machine per behavior.
        #[arg(long)]
        dedupe: bool,
        /// Write the counterexample machine and word here.
        #[arg(long, value_name = "PATH")]
        witness: Option<String>,
    },
    /// Decide whether Player 2 wins.
    Solve {
        input: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Belief)]
        method: Method,
        #[arg(short, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        dedupe: bool,
        /// Largest belief arena the belief method may build.
        #[arg(long, default_value_t = DEFAULT_POSITION_CAP)]
        position_cap: usize,
    },
    /// Play the adaptive controller against a hidden transducer.
    Simulate {
        input: Option<String>,
        #[arg(long)]
        env: String,
        #[arg(short, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        /// Write one STEP line per half-move here.
        #[arg(long, value_name = "PATH")]
        trace: Option<String>,
        #[arg(long)]
        strict_space: bool,
        #[arg(long)]
        dedupe: bool,
    },
    /// Generate game documents.
    #[command(subcommand)]
    Gen(Gen),
    /// Count or list the k-state machines over given alphabets.
    Enumerate {
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        sigma: usize,
        #[arg(long, default_value_t = 2)]
        gamma: usize,
        /// Take alphabets and symbol names from this game.
        #[arg(long)]
        game: Option<String>,
        /// Print only the number of machines.
        #[arg(long)]
        count: bool,
        #[arg(long)]
        dedupe: bool,
        #[arg(long)]
        limit: Option<u64>,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Game of a QDIMACS formula.
    Qbf {
        input: Option<String>,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Game of a DIMACS CNF formula.
    Cnf {
        input: Option<String>,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// The charging-station scenario.
    Robot {
        #[arg(long, default_value_t = 3)]
        lanes: usize,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// A random total game, reproducible from `--seed` and `--index`.
    Random {
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 12)]
        max_vertices: usize,
        #[arg(short, long)]
        output: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Knowledge-based construction against all k-state machines at once.
    Belief,
    /// k-transducer liveness, which implies that Player 2 wins.
    Live,
    /// Plain perfect-information solve of the game itself.
    Full,
}

enum Failure {
    Io { path: String, source: io::Error },
    Input(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io { .. } => EXIT_IO,
            Failure::Input(_) => EXIT_INPUT,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io { path, source } => format!("{path}: {source}"),
            Failure::Input(m) => m.clone(),
        }
    }
}

fn input_error(path: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{path}: {e}"))
}

/// Result of a subcommand: exit code and outcome; text already printed.
struct Done {
    code: u8,
    outcome: Outcome,
}

impl Done {
    fn ok() -> Self {
        Done { code: 0, outcome: Outcome::Ok }
    }
}

struct Ctx {
    global: Global,
    report: RunReport,
    started: Instant,
}

impl Ctx {
    fn read(&mut self, path: Option<&str>) -> Result<(String, String), Failure> {
        let label = path.unwrap_or("-").to_string();
        let text = if label == "-" {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|source| Failure::Io { path: label.clone(), source })?;
            s
        } else {
            fs::read_to_string(&label).map_err(|source| Failure::Io { path: label.clone(), source })?
        };
        self.report.inputs.push(InputRecord::new(&label, &text));
        Ok((label, text))
    }

    fn game(&mut self, path: Option<&str>) -> Result<GameGraph, Failure> {
        let (label, text) = self.read(path)?;
        parse_game(&text).map_err(|e| input_error(&label, e))
    }

    /// A game that the analyses accept: valid and total.
    fn total_game(&mut self, path: Option<&str>) -> Result<GameGraph, Failure> {
        let g = self.game(path)?;
        if let Some(v) = validate(&g).first() {
            return Err(Failure::Input(format!(
                "{}: not a total arena ({v}); run `ktlive validate` or `ktlive complete`",
                path.unwrap_or("-")
            )));
        }
        Ok(g)
    }

    fn machine(&mut self, path: &str, g: &GameGraph) -> Result<Transducer, Failure> {
        let (label, text) = self.read(Some(path))?;
        let doc = parse_transducer(&text).map_err(|e| input_error(&label, e))?;
        doc.for_game(g).map_err(|e| input_error(&label, e))
    }

    fn stat_elapsed(&mut self) {
        if !self.global.deterministic {
            self.report.stat("elapsed_ms", self.started.elapsed().as_millis() as u64);
        }
    }
}

fn write_out(path: Option<&str>, text: &str) -> Result<(), Failure> {
    match path {
        None | Some("-") => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| Failure::Io { path: "-".into(), source })
        }
        Some(p) => fs::write(p, text).map_err(|source| Failure::Io { path: p.into(), source }),
    }
}

fn word_names(g: &GameGraph, word: &[usize]) -> String {
    word.iter()
        .enumerate()
        .map(|(i, &s)| {
            let player = if i % 2 == 0 { Player::One } else { Player::Two };
            g.symbol_name(Action { player, symbol: s }).to_string()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn live_options(ctx: &Ctx, dedupe: bool) -> LiveOptions {
    LiveOptions {
        dedupe,
        jobs: ctx.global.jobs,
        cap: ctx.global.cap,
        deterministic: ctx.global.deterministic || ctx.global.jobs <= 1,
    }
}

/// Prints the verdict lines and fills the report for a liveness run.
fn report_liveness(ctx: &mut Ctx, g: &GameGraph, k: usize, r: &LivenessReport) -> Done {
    let mut lines = Vec::new();
    let done = match &r.verdict {
        Verdict::Live => {
            lines.push("verdict: live".to_string());
            Done { code: 0, outcome: Outcome::Ok }
        }
        Verdict::NotLive(w) => {
            lines.push("verdict: not-live".to_string());
            lines.push(format!("ordinal: {}", w.ordinal));
            lines.push(format!("position: ({},{})", g.name(w.position.0), w.position.1));
            lines.push(format!("word: {}", word_names(g, &w.alpha)));
            ctx.report.stat("witness_ordinal", w.ordinal);
            ctx.report.stat("witness_word", word_names(g, &w.alpha));
            Done { code: 1, outcome: Outcome::NotLive }
        }
        Verdict::Undecided { cap, total } => {
            lines.push("verdict: undecided-at-cap".to_string());
            lines.push(format!("cap: {cap}"));
            lines.push(format!("total: {total}"));
            ctx.report.stat("total", total.to_string());
            Done { code: 2, outcome: Outcome::UndecidedAtCap }
        }
    };
    lines.push(format!("k: {k}"));
    if ctx.global.jobs <= 1 || !matches!(r.verdict, Verdict::NotLive(_)) {
        // Counters of a parallel run that stops early depend on scheduling.
        lines.push(format!("examined: {}", r.stats.examined));
        lines.push(format!("products: {}", r.stats.products));
        ctx.report.stat("examined", r.stats.examined);
        ctx.report.stat("products", r.stats.products);
    }
    println!("{}", lines.join("\n"));
    done
}

fn run(ctx: &mut Ctx, command: Command) -> Result<Done, Failure> {
    match command {
        Command::Validate { input } => {
            let g = ctx.game(input.as_deref())?;
            let violations = validate(&g);
            for v in &violations {
                println!("{v}");
            }
            ctx.report.stat("violations", violations.len());
            ctx.report.stat("vertices", g.len());
            if violations.is_empty() {
                Ok(Done::ok())
            } else {
                ctx.report.message = Some(format!("{} violation(s)", violations.len()));
                Ok(Done { code: 1, outcome: Outcome::Error })
            }
        }
        Command::Complete { input, output } => {
            let g = ctx.game(input.as_deref())?;
            let c = complete(&g);
            ctx.report.stat("added_vertices", c.len() - g.len());
            ctx.report.stat("added_edges", c.edge_count() - g.edge_count());
            write_out(output.as_deref(), &serialize_game(&c))?;
            Ok(Done::ok())
        }
        Command::Product { input, transducer, full, output, lasso } => {
            let g = ctx.total_game(input.as_deref())?;
            let t = ctx.machine(&transducer, &g)?;
            ctx.report.param("full", full);
            let p = ProductGame::build_with(&g, &t, full).map_err(|e| Failure::Input(e.to_string()))?;
            let pg = p.to_game_graph().map_err(|e| Failure::Input(e.to_string()))?;
            write_out(output.as_deref(), &serialize_game(&pg))?;
            ctx.report.stat("positions", p.len());
            let wins = p.p2_wins(p.initial());
            ctx.report.stat("p2_wins_initial", wins);
            if let Some(path) = lasso {
                let text = match p.winning_lasso(p.initial()) {
                    Ok(l) => format!("{}\n", l.display(&p)),
                    Err(e) => format!("# {e}\n"),
                };
                write_out(Some(&path), &text)?;
            }
            Ok(Done::ok())
        }
        Command::CheckLive { input, k, dedupe, witness } => {
            let g = ctx.total_game(input.as_deref())?;
            ctx.report.param("k", k);
            ctx.report.param("dedupe", dedupe);
            let r = check_k_live(&g, k, &live_options(ctx, dedupe)).map_err(|e| Failure::Input(e.to_string()))?;
            let done = report_liveness(ctx, &g, k, &r);
            if let (Some(path), Verdict::NotLive(w)) = (witness, &r.verdict) {
                let mut text = serialize_transducer(&TransducerDoc::from_game(w.machine.clone(), &g));
                text.push_str(&format!("# ordinal {}\n", w.ordinal));
                text.push_str(&format!("# word {}\n", word_names(&g, &w.alpha)));
                text.push_str(&format!("# position ({},{})\n", g.name(w.position.0), w.position.1));
                write_out(Some(&path), &text)?;
            }
            ctx.stat_elapsed();
            Ok(done)
        }
        Command::Solve { input, method, k, dedupe, position_cap } => {
            let g = ctx.total_game(input.as_deref())?;
            ctx.report.param("method", format!("{method:?}").to_lowercase());
            ctx.report.param("k", k);
            ctx.report.param("dedupe", dedupe);
            let done = match method {
                Method::Full => {
                    let sol = solve_parity(&g).map_err(|e| Failure::Input(e.to_string()))?;
                    let winner = sol.winner[g.initial()];
                    println!("winner: P{}", winner.number());
                    println!("p2_region: {}", sol.region(Player::Two).len());
                    println!("p1_region: {}", sol.region(Player::One).len());
                    ctx.report.stat("p2_region", sol.region(Player::Two).len());
                    if winner == Player::Two {
                        Done::ok()
                    } else {
                        Done { code: 1, outcome: Outcome::P1Wins }
                    }
                }
                Method::Live => {
                    let r = check_k_live(&g, k, &live_options(ctx, dedupe))
                        .map_err(|e| Failure::Input(e.to_string()))?;
                    report_liveness(ctx, &g, k, &r)
                }
                Method::Belief => {
                    let opts = BoundedOptions { dedupe, machine_cap: ctx.global.cap, position_cap };
                    match solve_bounded(&g, k, &opts).map_err(|e| Failure::Input(e.to_string()))? {
                        Bounded::Decided(b) => {
                            let wins = b.p2_wins();
                            println!("winner: P{}", if wins { 2 } else { 1 });
                            println!("belief_positions: {}", b.len());
                            ctx.report.stat("belief_positions", b.len());
                            if wins {
                                Done::ok()
                            } else {
                                Done { code: 1, outcome: Outcome::P1Wins }
                            }
                        }
                        Bounded::Undecided(why) => {
                            println!("winner: undecided-at-cap");
                            println!("reason: {why}");
                            ctx.report.message = Some(why);
                            Done { code: 2, outcome: Outcome::UndecidedAtCap }
                        }
                    }
                }
            };
            ctx.stat_elapsed();
            Ok(done)
        }
        Command::Simulate { input, env, k, max_steps, trace, strict_space, dedupe } => {
            let g = ctx.total_game(input.as_deref())?;
            let hidden = ctx.machine(&env, &g)?;
            ctx.report.param("k", k);
            ctx.report.param("max_steps", max_steps);
            ctx.report.param("strict_space", strict_space);
            ctx.report.param("dedupe", dedupe);
            let opts = ControllerOptions { dedupe, strict_space, cap: ctx.global.cap };
            let mut c = match Controller::new(&g, k, opts) {
                Ok(c) => c,
                Err(e @ SynthesisError::Cap { .. }) => {
                    println!("winner: undecided-at-cap");
                    ctx.report.message = Some(e.to_string());
                    return Ok(Done { code: 2, outcome: Outcome::UndecidedAtCap });
                }
                Err(e) => return Err(Failure::Input(e.to_string())),
            };
            let tr = simulate(&g, &mut c, &hidden, max_steps).map_err(|e| Failure::Input(e.to_string()))?;
            let bound = steps_bound(g.len(), k, g.alphabet1().len(), g.alphabet2().len());
            let winner = match tr.winner {
                Some(p) => format!("P{}", p.number()),
                None => "none".to_string(),
            };
            println!("winner: {winner}");
            println!("steps: {}", tr.steps);
            println!("bound: {bound}");
            println!("hypotheses: {}", tr.hypothesis_log.len());
            ctx.report.stat("winner", winner);
            ctx.report.stat("steps", tr.steps);
            ctx.report.stat("bound", bound.to_string());
            ctx.report.stat("hypotheses", tr.hypothesis_log.len());
            if let Some(path) = trace {
                write_out(Some(&path), &tr.lines(&g))?;
            }
            ctx.stat_elapsed();
            Ok(match tr.winner {
                Some(Player::Two) => Done::ok(),
                Some(Player::One) => Done { code: 1, outcome: Outcome::P1Wins },
                None => Done { code: 2, outcome: Outcome::UndecidedAtCap },
            })
        }
        Command::Gen(gen) => {
            let (g, output) = match gen {
                Gen::Qbf { input, output } => {
                    let (label, text) = ctx.read(input.as_deref())?;
                    let psi = parse_qdimacs(&text).map_err(|e| input_error(&label, e))?;
                    (qbf_to_game(&psi), output)
                }
                Gen::Cnf { input, output } => {
                    let (label, text) = ctx.read(input.as_deref())?;
                    let phi = parse_dimacs(&text).map_err(|e| input_error(&label, e))?;
                    (cnf_to_game(&phi), output)
                }
                Gen::Robot { lanes, output } => {
                    ctx.report.param("lanes", lanes);
                    (robot_scenario(lanes).map_err(|e| Failure::Input(e.to_string()))?, output)
                }
                Gen::Random { index, max_vertices, output } => {
                    ctx.report.param("seed", ctx.global.seed);
                    ctx.report.param("index", index);
                    ctx.report.param("max_vertices", max_vertices);
                    let params = CorpusParams { max_vertices, ..Default::default() };
                    if max_vertices < params.min_vertices {
                        return Err(Failure::Input(format!("--max-vertices must be at least {}", params.min_vertices)));
                    }
                    let g = random_corpus(ctx.global.seed, index + 1, &params).pop().expect("index + 1 games");
                    (g, output)
                }
            };
            ctx.report.stat("vertices", g.len());
            write_out(output.as_deref(), &serialize_game(&g))?;
            Ok(Done::ok())
        }
        Command::Enumerate { k, sigma, gamma, game, count: only_count, dedupe, limit } => {
            let (inputs, outputs) = match &game {
                Some(path) => {
                    let g = ctx.game(Some(path))?;
                    (g.alphabet2().to_vec(), g.alphabet1().to_vec())
                }
                None => (
                    (0..gamma).map(|i| format!("b{i}")).collect(),
                    (0..sigma).map(|i| format!("a{i}")).collect(),
                ),
            };
            let (sigma, gamma) = (outputs.len(), inputs.len());
            ctx.report.param("k", k);
            ctx.report.param("sigma", sigma);
            ctx.report.param("gamma", gamma);
            if k == 0 || sigma == 0 || gamma == 0 {
                return Err(Failure::Input("k and both alphabets must be nonempty".into()));
            }
            let total = count(k, sigma, gamma);
            ctx.report.stat("count", total.to_string());
            if only_count {
                println!("{total}");
                return Ok(Done::ok());
            }
            let e = match Enumeration::new(k, sigma, gamma) {
                Ok(e) if e.len() <= ctx.global.cap || limit.is_some_and(|l| l <= ctx.global.cap) => e,
                _ => {
                    eprintln!("{total} machines exceed the cap of {}; use --limit or --cap", ctx.global.cap);
                    return Ok(Done { code: 2, outcome: Outcome::UndecidedAtCap });
                }
            };
            let mut out = io::stdout().lock();
            let mut written = 0u64;
            for (ord, t) in e.iter() {
                if limit.is_some_and(|l| written >= l) {
                    break;
                }
                if dedupe && !is_canonical(&t) {
                    continue;
                }
                let doc = TransducerDoc { inputs: inputs.clone(), outputs: outputs.clone(), machine: t };
                let text = format!("# ordinal {ord}\n{}\n", serialize_transducer(&doc));
                out.write_all(text.as_bytes()).map_err(|source| Failure::Io { path: "-".into(), source })?;
                written += 1;
            }
            ctx.report.stat("written", written);
            Ok(Done::ok())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Complete { .. } => "complete",
        Command::Product { .. } => "product",
        Command::CheckLive { .. } => "check-live",
        Command::Solve { .. } => "solve",
        Command::Simulate { .. } => "simulate",
        Command::Gen(Gen::Qbf { .. }) => "gen qbf",
        Command::Gen(Gen::Cnf { .. }) => "gen cnf",
        Command::Gen(Gen::Robot { .. }) => "gen robot",
        Command::Gen(Gen::Random { .. }) => "gen random",
        Command::Enumerate { .. } => "enumerate",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut ctx = Ctx { global: cli.global.clone(), report: RunReport::new(command_name(&cli.command)), started: Instant::now() };
    ctx.report.param("jobs", ctx.global.jobs);
    ctx.report.param("cap", ctx.global.cap);
    ctx.report.param("deterministic", ctx.global.deterministic);

    let code = match run(&mut ctx, cli.command) {
        Ok(done) => {
            ctx.report.outcome = done.outcome;
            done.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ctx.report.outcome = Outcome::Error;
            ctx.report.message = Some(f.message());
            f.exit_code()
        }
    };
    ctx.report.exit_code = i32::from(code);
    if let Some(path) = &ctx.global.json_report {
        if let Err(e) = fs::write(path, ctx.report.to_json()) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_IO);
        }
    }
    ExitCode::from(code)
}
