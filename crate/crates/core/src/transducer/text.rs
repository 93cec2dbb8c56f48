//! Transducer documents.
//!
//! ```text
//! transducer k=<uint>
//! inputs <sym> ...
//! outputs <sym> ...
//! init 0
//! label <state> <sym>
//! trans <state> <insym> <state>
//! ```

use std::fmt::Write as _;

use super::{Transducer, TransducerError};
use crate::game::GameGraph;

/// A machine together with the symbol names of its alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransducerDoc {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub machine: Transducer,
}

impl TransducerDoc {
    /// Names a machine by the alphabets of `g` (outputs are Player-1 symbols).
    pub fn from_game(machine: Transducer, g: &GameGraph) -> Self {
        TransducerDoc {
            inputs: g.alphabet2().to_vec(),
            outputs: g.alphabet1().to_vec(),
            machine,
        }
    }

    /// Re-indexes the machine onto the alphabets of `g`. The input alphabet
    /// must be exactly `g`'s Player-2 alphabet (in any order); outputs must
    /// be Player-1 symbols of `g`.
    pub fn for_game(&self, g: &GameGraph) -> Result<Transducer, TransducerError> {
        let mismatch = |m: String| TransducerError::AlphabetMismatch(m);
        if self.inputs.len() != g.alphabet2().len() {
            return Err(mismatch(format!(
                "transducer reads {} symbols, the game's player 2 has {}",
                self.inputs.len(),
                g.alphabet2().len()
            )));
        }
        let out_map: Vec<usize> = self
            .outputs
            .iter()
            .map(|s| {
                g.alphabet1()
                    .iter()
                    .position(|x| x == s)
                    .ok_or_else(|| mismatch(format!("output `{s}` is not a player-1 symbol")))
            })
            .collect::<Result<_, _>>()?;
        // position of each game input symbol in the document's input list
        let in_pos: Vec<usize> = g
            .alphabet2()
            .iter()
            .map(|s| {
                self.inputs
                    .iter()
                    .position(|x| x == s)
                    .ok_or_else(|| mismatch(format!("player-2 symbol `{s}` is not an input")))
            })
            .collect::<Result<_, _>>()?;
        let t = &self.machine;
        let labels = t.labels().iter().map(|&l| out_map[l]).collect();
        let mut trans = Vec::with_capacity(t.transitions().len());
        for m in 0..t.states() {
            for &p in &in_pos {
                trans.push(t.next(m, p));
            }
        }
        Transducer::new(g.alphabet1().len(), g.alphabet2().len(), t.initial(), labels, trans)
    }
}

fn perr(line: usize, message: impl Into<String>) -> TransducerError {
    TransducerError::Parse { line, message: message.into() }
}

pub fn parse_transducer(text: &str) -> Result<TransducerDoc, TransducerError> {
    let mut k: Option<usize> = None;
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut init: Option<usize> = None;
    let mut labels: Vec<(usize, usize, String)> = Vec::new();
    let mut trans: Vec<(usize, usize, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = tokens.first() else { continue };
        let args = &tokens[1..];
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(perr(line, format!("`{head}` expects {n} argument(s)")))
            }
        };
        match head {
            "transducer" => {
                arity(1)?;
                let v = args[0]
                    .strip_prefix("k=")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(line, "expected `k=<uint>`"))?;
                if k.replace(v).is_some() {
                    return Err(perr(line, "duplicate `transducer` line"));
                }
            }
            "inputs" | "outputs" => {
                let slot = if head == "inputs" { &mut inputs } else { &mut outputs };
                let syms: Vec<String> = args.iter().map(|s| s.to_string()).collect();
                let mut sorted = syms.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != syms.len() {
                    return Err(perr(line, "duplicate symbol"));
                }
                if slot.replace(syms).is_some() {
                    return Err(perr(line, format!("duplicate `{head}` line")));
                }
            }
            "init" => {
                arity(1)?;
                let v = args[0].parse().map_err(|_| perr(line, "expected a state number"))?;
                if init.replace(v).is_some() {
                    return Err(perr(line, "duplicate `init` line"));
                }
            }
            "label" => {
                arity(2)?;
                let m = args[0].parse().map_err(|_| perr(line, "expected a state number"))?;
                labels.push((line, m, args[1].to_string()));
            }
            "trans" => {
                arity(3)?;
                let m = args[0].parse().map_err(|_| perr(line, "expected a state number"))?;
                trans.push((line, m, args[1].to_string(), args[2].to_string()));
            }
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
    }

    let k = k.ok_or_else(|| perr(1, "missing `transducer k=` line"))?;
    let inputs = inputs.ok_or_else(|| perr(1, "missing `inputs` line"))?;
    let outputs = outputs.ok_or_else(|| perr(1, "missing `outputs` line"))?;
    let init = init.ok_or_else(|| perr(1, "missing `init` line"))?;
    if k == 0 || inputs.is_empty() || outputs.is_empty() {
        return Err(TransducerError::Empty);
    }
    if init >= k {
        return Err(perr(1, format!("initial state {init} out of range")));
    }

    let mut label_of: Vec<Option<usize>> = vec![None; k];
    for (line, m, sym) in labels {
        if m >= k {
            return Err(perr(line, format!("state {m} out of range")));
        }
        let l = outputs
            .iter()
            .position(|s| *s == sym)
            .ok_or_else(|| perr(line, format!("unknown output `{sym}`")))?;
        if label_of[m].replace(l).is_some() {
            return Err(perr(line, format!("state {m} labeled twice")));
        }
    }
    let mut target: Vec<Option<usize>> = vec![None; k * inputs.len()];
    for (line, m, sym, dst) in trans {
        let b = inputs
            .iter()
            .position(|s| *s == sym)
            .ok_or_else(|| perr(line, format!("unknown input `{sym}`")))?;
        let d: usize = dst.parse().map_err(|_| perr(line, "expected a state number"))?;
        if m >= k || d >= k {
            return Err(perr(line, "state out of range"));
        }
        if target[m * inputs.len() + b].replace(d).is_some() {
            return Err(perr(line, format!("transition of state {m} on `{sym}` given twice")));
        }
    }
    let labels: Vec<usize> = label_of
        .iter()
        .enumerate()
        .map(|(m, l)| l.ok_or_else(|| perr(1, format!("state {m} has no label"))))
        .collect::<Result<_, _>>()?;
    let trans: Vec<usize> = target
        .iter()
        .enumerate()
        .map(|(j, d)| {
            d.ok_or_else(|| perr(1, format!("state {} has no transition on `{}`", j / inputs.len(), inputs[j % inputs.len()])))
        })
        .collect::<Result<_, _>>()?;
    let machine = Transducer::new(outputs.len(), inputs.len(), init, labels, trans)?;
    Ok(TransducerDoc { inputs, outputs, machine })
}

pub fn serialize_transducer(doc: &TransducerDoc) -> String {
    let t = &doc.machine;
    let mut out = String::new();
    writeln!(out, "transducer k={}", t.states()).unwrap();
    writeln!(out, "inputs {}", doc.inputs.join(" ")).unwrap();
    writeln!(out, "outputs {}", doc.outputs.join(" ")).unwrap();
    writeln!(out, "init {}", t.initial()).unwrap();
    for m in 0..t.states() {
        writeln!(out, "label {m} {}", doc.outputs[t.label(m)]).unwrap();
    }
    for m in 0..t.states() {
        for (b, sym) in doc.inputs.iter().enumerate() {
            writeln!(out, "trans {m} {sym} {}", t.next(m, b)).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Objective;

    const TOGGLE: &str = "\
transducer k=2
inputs x
outputs a b
init 0
label 0 a
label 1 b
trans 0 x 1
trans 1 x 0
";

    #[test]
    fn round_trip() {
        let doc = parse_transducer(TOGGLE).unwrap();
        assert_eq!(doc.machine.labels(), &[0, 1]);
        assert_eq!(serialize_transducer(&doc), TOGGLE);
    }

    #[test]
    fn missing_transition_is_reported() {
        let err = parse_transducer(&TOGGLE.replace("trans 1 x 0\n", "")).unwrap_err();
        assert!(err.to_string().contains("no transition"));
    }

    #[test]
    fn remaps_onto_game_alphabets() {
        let g = GameGraph::with_symbols(Objective::Parity, &["c", "b", "a"], &["y", "x"]).unwrap();
        let doc = parse_transducer(
            "transducer k=1\ninputs x y\noutputs a\ninit 0\nlabel 0 a\ntrans 0 x 0\ntrans 0 y 0\n",
        )
        .unwrap();
        let t = doc.for_game(&g).unwrap();
        assert_eq!(t.label(0), 2);
        assert_eq!(t.outputs(), 3);
        let bad = GameGraph::with_symbols(Objective::Parity, &["c"], &["y", "x"]).unwrap();
        assert!(matches!(doc.for_game(&bad), Err(TransducerError::AlphabetMismatch(_))));
    }
}
