//! Moore-style transducers modelling a bounded environment.
//!
//! A transducer reads Player-2 symbols and labels each state with a
//! Player-1 symbol. States are `0..k`; symbols are indices into the output
//! (Player 1) and input (Player 2) alphabets of the game it plays in.

use std::collections::VecDeque;

use thiserror::Error;

use crate::game::LassoWord;

mod enumerate;
mod text;

pub use enumerate::{canonical_form, count, is_canonical, Enumeration, EnumerationError, Ordinals};
pub use text::{parse_transducer, serialize_transducer, TransducerDoc};

pub type StateId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransducerError {
    #[error("a transducer needs at least one state and nonempty alphabets")]
    Empty,
    #[error("expected {expected} {what}, got {got}")]
    Shape { what: &'static str, expected: usize, got: usize },
    #[error("{what} {value} out of range at index {index}")]
    OutOfRange { what: &'static str, index: usize, value: usize },
    #[error("history must end after a player-2 action")]
    MalformedHistory,
    #[error("symbol at word index {index} is outside its alphabet")]
    UnknownSymbol { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transducer {
    outputs: usize,
    inputs: usize,
    initial: StateId,
    labels: Vec<usize>,
    /// Row-major: the successor of `m` on input `b` is `trans[m * inputs + b]`.
    trans: Vec<StateId>,
}

/// Result of an agreement check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Agreement {
    Agrees,
    /// Word index of the first Player-1 action the transducer would not emit.
    DisagreesAt(usize),
}

impl Agreement {
    pub fn holds(self) -> bool {
        self == Agreement::Agrees
    }
}

impl Transducer {
    pub fn new(
        outputs: usize,
        inputs: usize,
        initial: StateId,
        labels: Vec<usize>,
        trans: Vec<StateId>,
    ) -> Result<Self, TransducerError> {
        let k = labels.len();
        if k == 0 || outputs == 0 || inputs == 0 {
            return Err(TransducerError::Empty);
        }
        if trans.len() != k * inputs {
            return Err(TransducerError::Shape { what: "transitions", expected: k * inputs, got: trans.len() });
        }
        if initial >= k {
            return Err(TransducerError::OutOfRange { what: "initial state", index: 0, value: initial });
        }
        if let Some(i) = labels.iter().position(|&l| l >= outputs) {
            return Err(TransducerError::OutOfRange { what: "label", index: i, value: labels[i] });
        }
        if let Some(i) = trans.iter().position(|&m| m >= k) {
            return Err(TransducerError::OutOfRange { what: "target state", index: i, value: trans[i] });
        }
        Ok(Transducer { outputs, inputs, initial, labels, trans })
    }

    /// The one-state machine that always emits `label`.
    pub fn constant(outputs: usize, inputs: usize, label: usize) -> Self {
        Transducer::new(outputs, inputs, 0, vec![label], vec![0; inputs]).expect("valid constant machine")
    }

    pub(crate) fn from_parts_unchecked(
        outputs: usize,
        inputs: usize,
        labels: Vec<usize>,
        trans: Vec<StateId>,
    ) -> Self {
        Transducer { outputs, inputs, initial: 0, labels, trans }
    }

    pub fn states(&self) -> usize {
        self.labels.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn label(&self, m: StateId) -> usize {
        self.labels[m]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn transitions(&self) -> &[StateId] {
        &self.trans
    }

    pub fn next(&self, m: StateId, input: usize) -> StateId {
        self.trans[m * self.inputs + input]
    }

    pub(crate) fn labels_mut(&mut self) -> &mut [usize] {
        &mut self.labels
    }

    pub(crate) fn transitions_mut(&mut self) -> &mut [StateId] {
        &mut self.trans
    }

    fn check_input(&self, index: usize, b: usize) -> Result<(), TransducerError> {
        if b >= self.inputs {
            return Err(TransducerError::UnknownSymbol { index });
        }
        Ok(())
    }

    /// State reached from `from` after reading `inputs`.
    pub fn state_after_from(&self, from: StateId, inputs: &[usize]) -> Result<StateId, TransducerError> {
        let mut m = from;
        for (i, &b) in inputs.iter().enumerate() {
            self.check_input(i, b)?;
            m = self.next(m, b);
        }
        Ok(m)
    }

    pub fn state_after(&self, inputs: &[usize]) -> Result<StateId, TransducerError> {
        self.state_after_from(self.initial, inputs)
    }

    /// Runs the machine on `inputs`, returning the final state and the label
    /// of every state entered. The label of the initial state is `label(initial())`.
    pub fn run(&self, inputs: &[usize]) -> Result<(StateId, Vec<usize>), TransducerError> {
        let mut m = self.initial;
        let mut out = Vec::with_capacity(inputs.len());
        for (i, &b) in inputs.iter().enumerate() {
            self.check_input(i, b)?;
            m = self.next(m, b);
            out.push(self.labels[m]);
        }
        Ok((m, out))
    }

    /// The next Player-1 action of the strategy induced by the machine after
    /// `history`, which must be empty or end with a Player-2 action.
    pub fn induced_strategy(&self, history: &[usize]) -> Result<usize, TransducerError> {
        if history.len() % 2 != 0 {
            return Err(TransducerError::MalformedHistory);
        }
        let mut m = self.initial;
        for (i, &b) in history.iter().enumerate().skip(1).step_by(2) {
            self.check_input(i, b)?;
            m = self.next(m, b);
        }
        Ok(self.labels[m])
    }

    /// Checks a finite alternating word `a0 b0 a1 b1 ...` against the machine.
    pub fn agrees(&self, word: &[usize]) -> Result<Agreement, TransducerError> {
        let mut m = self.initial;
        Ok(match self.walk(&mut m, word, 0)? {
            Some(i) => Agreement::DisagreesAt(i),
            None => Agreement::Agrees,
        })
    }

    /// Advances `m` over `word`, whose first entry sits at global index
    /// `offset`. Returns the index of the first disagreement.
    fn walk(&self, m: &mut StateId, word: &[usize], offset: usize) -> Result<Option<usize>, TransducerError> {
        for (i, &s) in word.iter().enumerate() {
            let index = offset + i;
            if index % 2 == 0 {
                if s >= self.outputs {
                    return Err(TransducerError::UnknownSymbol { index });
                }
                if s != self.labels[*m] {
                    return Ok(Some(index));
                }
            } else {
                self.check_input(index, s)?;
                *m = self.next(*m, s);
            }
        }
        Ok(None)
    }

    /// Agreement with the infinite word `prefix · cycle^ω`, checked until the
    /// machine state at a cycle boundary repeats (at most `k` passes).
    pub fn agrees_lasso(&self, w: &LassoWord) -> Result<Agreement, TransducerError> {
        if w.cycle.is_empty() || w.cycle.len() % 2 != 0 {
            return Err(TransducerError::MalformedHistory);
        }
        let mut m = self.initial;
        if let Some(i) = self.walk(&mut m, &w.prefix, 0)? {
            return Ok(Agreement::DisagreesAt(i));
        }
        let mut seen = vec![false; self.states()];
        let mut offset = w.prefix.len();
        while !seen[m] {
            seen[m] = true;
            if let Some(i) = self.walk(&mut m, &w.cycle, offset)? {
                return Ok(Agreement::DisagreesAt(i));
            }
            offset += w.cycle.len();
        }
        Ok(Agreement::Agrees)
    }

    /// States reachable from the initial state.
    pub fn reachable_states(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(m) = queue.pop_front() {
            for b in 0..self.inputs {
                let n = self.next(m, b);
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        seen
    }
}

/// Shortest input word after which `t1` (from `m1`) and `t2` (from `m2`)
/// emit different labels, by breadth-first search over state pairs. Inputs
/// are tried in alphabet order. `None` iff the two are equivalent from there.
pub fn distinguishing_word(
    t1: &Transducer,
    m1: StateId,
    t2: &Transducer,
    m2: StateId,
) -> Option<Vec<usize>> {
    assert_eq!(t1.inputs, t2.inputs, "input alphabets differ");
    let k2 = t2.states();
    let index = |a: StateId, b: StateId| a * k2 + b;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; t1.states() * k2];
    let mut seen = vec![false; t1.states() * k2];
    seen[index(m1, m2)] = true;
    let mut queue = VecDeque::from([(m1, m2)]);
    while let Some((a, b)) = queue.pop_front() {
        if t1.label(a) != t2.label(b) {
            let mut word = Vec::new();
            let mut cur = index(a, b);
            while let Some((prev, input)) = parent[cur] {
                word.push(input);
                cur = prev;
            }
            word.reverse();
            return Some(word);
        }
        for input in 0..t1.inputs {
            let (na, nb) = (t1.next(a, input), t2.next(b, input));
            let j = index(na, nb);
            if !seen[j] {
                seen[j] = true;
                parent[j] = Some((index(a, b), input));
                queue.push_back((na, nb));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two states over input {x}; labels (a, b); x toggles.
    fn toggle() -> Transducer {
        Transducer::new(2, 1, 0, vec![0, 1], vec![1, 0]).unwrap()
    }

    #[test]
    fn empty_input_stays_initial() {
        let t = toggle();
        assert_eq!(t.run(&[]).unwrap(), (0, vec![]));
        assert_eq!(t.label(t.initial()), 0);
    }

    #[test]
    fn constant_machine_repeats_label() {
        let t = Transducer::constant(2, 2, 1);
        assert_eq!(t.run(&[0, 1, 1]).unwrap().1, vec![1, 1, 1]);
        assert_eq!(t.induced_strategy(&[0, 1, 1, 0]).unwrap(), 1);
    }

    #[test]
    fn toggle_trace() {
        let t = toggle();
        assert_eq!(t.run(&[0, 0]).unwrap(), (0, vec![1, 0]));
        assert_eq!(t.induced_strategy(&[]).unwrap(), 0);
        assert_eq!(t.induced_strategy(&[0, 0]).unwrap(), 1);
        assert_eq!(t.induced_strategy(&[0]), Err(TransducerError::MalformedHistory));
    }

    #[test]
    fn agreement() {
        let t = Transducer::constant(2, 1, 0);
        assert_eq!(t.agrees(&[0]).unwrap(), Agreement::Agrees);
        assert_eq!(t.agrees(&[0, 0, 0, 0, 1]).unwrap(), Agreement::DisagreesAt(4));
        assert_eq!(t.agrees(&[1]).unwrap(), Agreement::DisagreesAt(0));
        assert!(t.agrees(&[0, 3]).is_err());
    }

    #[test]
    fn lasso_agreement_checks_every_phase() {
        // Toggle machine emits a b a b ...; the word (a x)^ω disagrees on
        // its second pass.
        let t = toggle();
        let w = LassoWord::new(vec![], vec![0, 0]);
        assert_eq!(t.agrees_lasso(&w).unwrap(), Agreement::DisagreesAt(2));
        let w = LassoWord::new(vec![], vec![0, 0, 1, 0]);
        assert_eq!(t.agrees_lasso(&w).unwrap(), Agreement::Agrees);
    }

    #[test]
    fn distinguishing_words() {
        let t = toggle();
        let c = Transducer::constant(2, 1, 0);
        assert_eq!(distinguishing_word(&t, 0, &c, 0), Some(vec![0]));
        assert_eq!(distinguishing_word(&t, 0, &t, 0), None);
        assert_eq!(distinguishing_word(&t, 1, &c, 0), Some(vec![]));
    }

    #[test]
    fn rejects_malformed_machines() {
        assert!(Transducer::new(2, 1, 0, vec![2], vec![0]).is_err());
        assert!(Transducer::new(2, 1, 0, vec![0], vec![1]).is_err());
        assert!(Transducer::new(2, 2, 0, vec![0], vec![0]).is_err());
        assert!(Transducer::new(2, 1, 1, vec![0], vec![0]).is_err());
    }
}
