use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

use ktlive::game::{parse_game, validate, Action, Player};
use ktlive::reductions::{parse_dimacs, sat_brute_force};
use ktlive::transducer::{count, parse_transducer};

const GOOD: &str = "\
game buchi
alphabet1 a
alphabet2 b c
vertex u owner=1 color=1
vertex v owner=2 color=1
vertex w owner=1 color=2
init u
edge u a v
edge v b u
edge v c w
edge w a v
";

const UNSAT2: &str = "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n";
const SAT2: &str = "p cnf 2 2\n1 2 0\n-1 -2 0\n";
const FIG2: &str = "p cnf 4 3\na 1 0\ne 2 0\na 3 0\ne 4 0\n-1 2 -3 0\n-2 3 0\n1 -2 4 0\n";

fn ktlive(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ktlive"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))
}

/// Checks the documented report layout and returns the parsed report.
fn check_report(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let obj = v.as_object().unwrap();
    for key in ["command", "version", "inputs", "parameters", "outcome", "exit_code", "stats"] {
        assert!(obj.contains_key(key), "missing {key}");
    }
    assert!(obj["command"].is_string());
    assert_eq!(obj["version"], env!("CARGO_PKG_VERSION"));
    for input in obj["inputs"].as_array().unwrap() {
        assert!(input["path"].is_string());
        let hash = input["sha256"].as_str().unwrap();
        assert_eq!(hash.len(), 64);
        assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    }
    assert!(obj["parameters"].is_object());
    assert!(obj["stats"].is_object());
    let outcomes = ["ok", "not-live", "p1-wins", "undecided-at-cap", "error"];
    assert!(outcomes.contains(&obj["outcome"].as_str().unwrap()));
    assert!(obj["exit_code"].is_i64());
    v
}

#[test]
fn validate_accepts_a_good_game() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.bg", GOOD);
    let report = dir.path().join("r.json");
    let o = ktlive(&["validate", s(&g), "--json-report", s(&report)], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
    let r = check_report(&report);
    assert_eq!(r["outcome"], "ok");
    let expected = {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(GOOD.as_bytes()))
    };
    assert_eq!(r["inputs"][0]["sha256"], expected);
}

#[test]
fn validate_lists_violations() {
    let partial = GOOD.replace("edge v c w\n", "");
    let o = ktlive(&["validate"], Some(&partial));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "VIOLATION missing-edge v c\n");
}

#[test]
fn completion_through_pipes() {
    let partial = GOOD.replace("edge v c w\n", "");
    let o = ktlive(&["complete"], Some(&partial));
    assert_eq!(o.status.code(), Some(0));
    let g = parse_game(&stdout(&o)).unwrap();
    assert!(validate(&g).is_empty());
    let v = g.vertex_id("v").unwrap();
    assert_eq!(g.name(g.edge(v, Action { player: Player::Two, symbol: 1 }).unwrap()), "~par1_u");
    let again = ktlive(&["validate", "-"], Some(&stdout(&o)));
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn error_exit_codes() {
    assert_eq!(ktlive(&["validate", "/nonexistent/game.bg"], None).status.code(), Some(3));
    assert_eq!(ktlive(&["validate"], Some("game chess\n")).status.code(), Some(4));
    assert_eq!(ktlive(&["check-live"], Some(GOOD)).status.code(), Some(2));
    assert_eq!(ktlive(&["frobnicate"], None).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let o = ktlive(&["check-live", "-k", "1", "--json-report", s(&report)], Some(&GOOD.replace("edge w a v\n", "")));
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(check_report(&report)["outcome"], "error");
}

#[test]
fn unsatisfiable_cnf_pipeline_is_live() {
    let game = ktlive(&["gen", "cnf"], Some(UNSAT2));
    assert_eq!(game.status.code(), Some(0));
    let o = ktlive(&["check-live", "-k", "2"], Some(&stdout(&game)));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "verdict"), "live");
}

#[test]
fn satisfiable_cnf_has_a_checked_witness() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "sat.cnf", SAT2);
    let game = dir.path().join("g.bg");
    assert_eq!(ktlive(&["gen", "cnf", s(&cnf), "-o", s(&game)], None).status.code(), Some(0));
    let witness = dir.path().join("w.tr");
    let report = dir.path().join("r.json");
    let o = ktlive(&["check-live", s(&game), "-k", "2", "--witness", s(&witness), "--json-report", s(&report)], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(field(&stdout(&o), "verdict"), "not-live");
    assert_eq!(check_report(&report)["outcome"], "not-live");

    // The machine replays a satisfying assignment; the oracle agrees one exists.
    assert!(sat_brute_force(&parse_dimacs(SAT2).unwrap()).is_some());
    let g = parse_game(&std::fs::read_to_string(&game).unwrap()).unwrap();
    let doc = parse_transducer(&std::fs::read_to_string(&witness).unwrap()).unwrap();
    let t = doc.for_game(&g).unwrap();
    let word: Vec<usize> = field(&stdout(&o), "word")
        .split_whitespace()
        .enumerate()
        .map(|(i, sym)| g.symbol_index(if i % 2 == 0 { Player::One } else { Player::Two }, sym).unwrap())
        .collect();
    assert!(t.agrees(&word).unwrap().holds());
}

#[test]
fn deterministic_runs_repeat_exactly() {
    let dir = TempDir::new().unwrap();
    let mut outs = Vec::new();
    for run in 0..2 {
        let game = ktlive(&["gen", "random", "--seed", "4", "--index", "0"], None);
        let report = dir.path().join(format!("r{run}.json"));
        let o = ktlive(
            &["check-live", "-k", "2", "--jobs", "3", "--deterministic", "--json-report", s(&report)],
            Some(&stdout(&game)),
        );
        outs.push((stdout(&game), stdout(&o), std::fs::read_to_string(&report).unwrap(), o.status.code()));
    }
    assert_eq!(outs[0], outs[1]);
    // The serial run reports the same counterexample.
    let serial = stdout(&ktlive(&["check-live", "-k", "2"], Some(&outs[0].0)));
    for key in ["verdict", "ordinal", "position", "word"] {
        assert_eq!(field(&serial, key), field(&outs[0].1, key));
    }
}

#[test]
fn controller_wins_a_live_game() {
    let dir = TempDir::new().unwrap();
    let game = dir.path().join("g.bg");
    ktlive(&["gen", "random", "--seed", "4", "--index", "1", "-o", s(&game)], None);
    assert_eq!(ktlive(&["check-live", s(&game), "-k", "2"], None).status.code(), Some(0));
    let env = write(
        &dir,
        "t.tr",
        "transducer k=2\ninputs b0 b1\noutputs a0 a1\ninit 0\nlabel 0 a0\nlabel 1 a1\n\
         trans 0 b0 1\ntrans 0 b1 0\ntrans 1 b0 0\ntrans 1 b1 1\n",
    );
    let trace = dir.path().join("trace.txt");
    let report = dir.path().join("r.json");
    let o = ktlive(
        &["simulate", s(&game), "--env", s(&env), "-k", "2", "--trace", s(&trace), "--json-report", s(&report)],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "winner"), "P2");
    let steps: u64 = field(&out, "steps").parse().unwrap();
    let bound: u64 = field(&out, "bound").parse().unwrap();
    assert!(steps <= bound);
    let lines = std::fs::read_to_string(&trace).unwrap();
    let first = lines.lines().next().unwrap();
    assert!(first.starts_with("STEP 0 P1 a0 p0"), "{first}");
    assert!(lines.lines().all(|l| l.starts_with("STEP ")));
    assert_eq!(check_report(&report)["stats"]["winner"], "P2");
}

#[test]
fn product_documents_parse() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.bg", GOOD);
    let t = write(&dir, "t.tr", "transducer k=1\ninputs b c\noutputs a\ninit 0\nlabel 0 a\ntrans 0 b 0\ntrans 0 c 0\n");
    let lasso = dir.path().join("lasso.txt");
    let o = ktlive(&["product", s(&g), "-t", s(&t), "--full", "--lasso", s(&lasso)], None);
    assert_eq!(o.status.code(), Some(0));
    let p = parse_game(&stdout(&o)).unwrap();
    assert_eq!(p.len(), 3 + 2);
    assert!(p.vertex_id("(u,0)").is_some());
    assert!(std::fs::read_to_string(&lasso).unwrap().starts_with("LASSO prefix:"));
}

#[test]
fn enumeration_counts_and_lists() {
    for (k, sigma, gamma) in [(1, 2, 2), (2, 3, 1), (3, 2, 2)] {
        let o = ktlive(&["enumerate", "-k", &k.to_string(), "--sigma", &sigma.to_string(), "--gamma", &gamma.to_string(), "--count"], None);
        assert_eq!(stdout(&o).trim(), count(k, sigma, gamma).to_string());
    }
    let o = ktlive(&["enumerate", "-k", "2", "--sigma", "2", "--gamma", "1"], None);
    let listing = stdout(&o);
    let docs: Vec<&str> = listing.split("\n\n").filter(|d| !d.trim().is_empty()).collect();
    assert_eq!(docs.len(), 16);
    for d in docs {
        assert!(parse_transducer(d).is_ok());
    }
    let capped = ktlive(&["enumerate", "-k", "3", "--cap", "10"], None);
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn generators_emit_total_games() {
    let qbf = ktlive(&["gen", "qbf"], Some(FIG2));
    assert_eq!(qbf.status.code(), Some(0));
    assert!(validate(&parse_game(&stdout(&qbf)).unwrap()).is_empty());
    let robot = ktlive(&["gen", "robot", "--lanes", "2"], None);
    let g = parse_game(&stdout(&robot)).unwrap();
    assert!(validate(&g).is_empty());
    let o = ktlive(&["solve", "--method", "belief", "-k", "2"], Some(&stdout(&robot)));
    assert_eq!((o.status.code(), field(&stdout(&o), "winner").to_string()), (Some(0), "P2".to_string()));
    assert_eq!(ktlive(&["gen", "robot", "--lanes", "1"], None).status.code(), Some(4));
}

#[test]
fn belief_solve_reports_caps() {
    let o = ktlive(&["solve", "--method", "belief", "-k", "3", "--cap", "5"], Some(GOOD));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(field(&stdout(&o), "winner"), "undecided-at-cap");
}
