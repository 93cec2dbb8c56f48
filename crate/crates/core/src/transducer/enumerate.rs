//! Lexicographic enumeration of all k-state machines with initial state 0.
//!
//! A machine is the digit string `L(0) .. L(k-1), η(0,b_1) .. η(k-1,b_|Γ|)`
//! read as a mixed-radix number, most significant digit first. Labels have
//! radix `|Σ|` and transition targets radix `k`.

use std::collections::{HashMap, VecDeque};
use std::ops::Range;

use num_bigint::BigUint;
use thiserror::Error;

use super::{StateId, Transducer};

/// `|Σ|^k · k^(k·|Γ|)`.
pub fn count(k: usize, outputs: usize, inputs: usize) -> BigUint {
    BigUint::from(outputs).pow(k as u32) * BigUint::from(k).pow((k * inputs) as u32)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("k and both alphabets must be nonempty")]
    Empty,
    #[error("{0} machines do not fit a 64-bit ordinal")]
    TooLarge(BigUint),
    #[error("ordinal {ordinal} out of range (count {count})")]
    OutOfRange { ordinal: u64, count: u64 },
    #[error("machine shape does not match the enumeration")]
    Shape,
}

/// The enumeration for fixed `(k, |Σ|, |Γ|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Enumeration {
    k: usize,
    outputs: usize,
    inputs: usize,
    len: u64,
}

impl Enumeration {
    pub fn new(k: usize, outputs: usize, inputs: usize) -> Result<Self, EnumerationError> {
        if k == 0 || outputs == 0 || inputs == 0 {
            return Err(EnumerationError::Empty);
        }
        let total = count(k, outputs, inputs);
        let len = u64::try_from(&total).map_err(|_| EnumerationError::TooLarge(total))?;
        Ok(Enumeration { k, outputs, inputs, len })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn digits(&self) -> usize {
        self.k + self.k * self.inputs
    }

    fn radix(&self, position: usize) -> u64 {
        if position < self.k {
            self.outputs as u64
        } else {
            self.k as u64
        }
    }

    pub fn decode(&self, ordinal: u64) -> Result<Transducer, EnumerationError> {
        if ordinal >= self.len {
            return Err(EnumerationError::OutOfRange { ordinal, count: self.len });
        }
        let mut digits = vec![0usize; self.digits()];
        let mut rest = ordinal;
        for p in (0..digits.len()).rev() {
            let r = self.radix(p);
            digits[p] = (rest % r) as usize;
            rest /= r;
        }
        let trans = digits.split_off(self.k);
        Ok(Transducer::from_parts_unchecked(self.outputs, self.inputs, digits, trans))
    }

    /// Inverse of [`Enumeration::decode`]. The machine must have `k` states,
    /// initial state 0 and matching alphabets.
    pub fn ordinal(&self, t: &Transducer) -> Result<u64, EnumerationError> {
        if t.states() != self.k || t.initial() != 0 || t.outputs() != self.outputs || t.inputs() != self.inputs {
            return Err(EnumerationError::Shape);
        }
        let mut ord = 0u64;
        for (p, &d) in t.labels().iter().chain(t.transitions()).enumerate() {
            ord = ord * self.radix(p) + d as u64;
        }
        Ok(ord)
    }

    pub fn iter(&self) -> Ordinals {
        self.range(0..self.len)
    }

    /// Machines with ordinals in `range`, in increasing order.
    pub fn range(&self, range: Range<u64>) -> Ordinals {
        let end = range.end.min(self.len);
        let start = range.start.min(end);
        let current = if start < end { Some(self.decode(start).unwrap()) } else { None };
        Ordinals { enumeration: *self, next: start, end, current }
    }
}

/// Iterator over `(ordinal, machine)` pairs; successive machines are
/// produced by incrementing the digit string in place.
#[derive(Clone, Debug)]
pub struct Ordinals {
    enumeration: Enumeration,
    next: u64,
    end: u64,
    current: Option<Transducer>,
}

impl Iterator for Ordinals {
    type Item = (u64, Transducer);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let t = self.current.clone()?;
        let ord = self.next;
        self.next += 1;
        if self.next < self.end {
            let cur = self.current.as_mut().unwrap();
            let e = self.enumeration;
            let k = e.k;
            // Odometer step: transition digits are least significant.
            let trans = cur.transitions_mut();
            let mut carry = true;
            for d in trans.iter_mut().rev() {
                *d += 1;
                if *d < k {
                    carry = false;
                    break;
                }
                *d = 0;
            }
            if carry {
                for d in cur.labels_mut().iter_mut().rev() {
                    *d += 1;
                    if *d < e.outputs {
                        break;
                    }
                    *d = 0;
                }
            }
        }
        Some((ord, t))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

/// The behavioral normal form of a machine: its reachable part is
/// minimized, states are renamed in breadth-first order from the initial
/// state (inputs in alphabet order), and unused states are padded with
/// label 0 and transitions to state 0. Machines inducing the same strategy
/// share a normal form, which has the same state count and initial state 0.
pub fn canonical_form(t: &Transducer) -> Transducer {
    let k = t.states();
    let inputs = t.inputs();
    let reach = t.reachable_states();
    let live: Vec<StateId> = (0..k).filter(|&m| reach[m]).collect();

    // Moore partition refinement on the reachable part.
    let mut class: Vec<usize> = vec![usize::MAX; k];
    for &m in &live {
        class[m] = t.label(m);
    }
    let mut classes = {
        let mut ls: Vec<usize> = live.iter().map(|&m| t.label(m)).collect();
        ls.sort_unstable();
        ls.dedup();
        ls.len()
    };
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut refined = vec![usize::MAX; k];
        for &m in &live {
            let mut sig = Vec::with_capacity(inputs + 1);
            sig.push(class[m]);
            sig.extend((0..inputs).map(|b| class[t.next(m, b)]));
            let next = ids.len();
            refined[m] = *ids.entry(sig).or_insert(next);
        }
        let stable = ids.len() == classes;
        classes = ids.len();
        class = refined;
        if stable {
            break;
        }
    }

    // Breadth-first renaming of the classes.
    let mut rep = vec![usize::MAX; classes];
    for &m in &live {
        if rep[class[m]] == usize::MAX {
            rep[class[m]] = m;
        }
    }
    let mut name = vec![usize::MAX; classes];
    let mut order = Vec::with_capacity(classes);
    let start = class[t.initial()];
    name[start] = 0;
    order.push(start);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for b in 0..inputs {
            let d = class[t.next(rep[c], b)];
            if name[d] == usize::MAX {
                name[d] = order.len();
                order.push(d);
                queue.push_back(d);
            }
        }
    }

    let mut labels = vec![0; k];
    let mut trans = vec![0; k * inputs];
    for (i, &c) in order.iter().enumerate() {
        labels[i] = t.label(rep[c]);
        for b in 0..inputs {
            trans[i * inputs + b] = name[class[t.next(rep[c], b)]];
        }
    }
    Transducer::from_parts_unchecked(t.outputs(), inputs, labels, trans)
}

/// Whether `t` is the representative of its behavioral class, i.e. equal
/// to its own normal form.
pub fn is_canonical(t: &Transducer) -> bool {
    t.initial() == 0 && canonical_form(t) == *t
}
