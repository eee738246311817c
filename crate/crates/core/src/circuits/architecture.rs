use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{MAX_ENUMERATION_GATES, MAX_ENUMERATION_SEQUENCES};
use crate::qcore::Gate2Q;
use crate::{Error, Result};

/// A gate slot: the pair of qubits one two-qubit gate acts on.
pub type Slot = (usize, usize);

/// Ordered list of gate slots on `n` qubits; slot order is execution order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Architecture {
    pub n: usize,
    pub slots: Vec<Slot>,
}

impl Architecture {
    pub fn new(n: usize, slots: Vec<Slot>) -> Result<Self> {
        for &s in &slots {
            crate::qcore::Gate2Q::identity(s).check_targets(n)?;
        }
        Ok(Self { n, slots })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, slots: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Short human-readable identifier, e.g. `n3:01.12`.
    pub fn id(&self) -> String {
        let body: Vec<String> = self.slots.iter().map(|(j, k)| format!("{j}{k}")).collect();
        format!("n{}:{}", self.n, if body.is_empty() { "-".to_string() } else { body.join(".") })
    }

    /// Concatenation `self` then `other`.
    pub fn then(&self, other: &Architecture) -> Result<Architecture> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        Ok(Architecture { n: self.n, slots })
    }

    pub fn from_gates(n: usize, gates: &[Gate2Q]) -> Result<Self> {
        Self::new(n, gates.iter().map(|g| g.targets).collect())
    }

    /// Representative of the class of slot sequences equal up to exchanging
    /// adjacent slots with disjoint support.
    ///
    /// Repeatedly emits the smallest (by unordered pair) slot that commutes with
    /// every slot still ahead of it, which yields the lexicographically least
    /// member of the class.
    pub fn canonical(&self) -> Architecture {
        let key = |s: Slot| (s.0.min(s.1), s.0.max(s.1));
        let mut rest: Vec<Slot> = self.slots.clone();
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for i in 0..rest.len() {
                let free = rest[..i].iter().all(|&p| disjoint(p, rest[i]));
                if free && best.is_none_or(|b| key(rest[i]) < key(rest[b])) {
                    best = Some(i);
                }
            }
            let i = best.expect("the first remaining slot is always free");
            out.push(rest.remove(i));
        }
        Architecture { n: self.n, slots: out }
    }
}

fn disjoint(a: Slot, b: Slot) -> bool {
    a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1
}

/// Brickwork layout: odd layers (1st, 3rd, …) pair (0,1), (2,3), …; even layers pair
/// (1,2), (3,4), …, and with periodic boundaries also (n−1, 0) when n is even.
///
/// For n = 2 every layer is the single slot (0,1). With periodic boundaries every
/// layer then holds ⌊n/2⌋ gates.
pub fn brickwork(n: usize, layers: usize, periodic: bool) -> Result<Architecture> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("brickwork needs n >= 2, got {n}")));
    }
    let mut slots = Vec::new();
    for layer in 1..=layers {
        if n == 2 {
            slots.push((0, 1));
            continue;
        }
        if layer % 2 == 1 {
            slots.extend((0..n - 1).step_by(2).map(|j| (j, j + 1)));
        } else {
            slots.extend((1..n - 1).step_by(2).map(|j| (j, j + 1)));
            if periodic && n.is_multiple_of(2) {
                slots.push((n - 1, 0));
            }
        }
    }
    Ok(Architecture { n, slots })
}

/// `gates` independent uniform unordered pairs of distinct qubits.
pub fn random_architecture<R: Rng + ?Sized>(n: usize, gates: usize, rng: &mut R) -> Result<Architecture> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("random architecture needs n >= 2, got {n}")));
    }
    let slots = (0..gates)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            (a.min(b), a.max(b))
        })
        .collect();
    Ok(Architecture { n, slots })
}

/// Finds a qubit whose backward light cone through the slot sequence covers every
/// qubit, returning the smallest such qubit.
pub fn has_light_cone(arch: &Architecture) -> (bool, Option<usize>) {
    let n = arch.n;
    for apex in 0..n {
        let mut cone = vec![false; n];
        cone[apex] = true;
        for &(a, b) in arch.slots.iter().rev() {
            if cone[a] || cone[b] {
                cone[a] = true;
                cone[b] = true;
            }
        }
        if cone.iter().all(|&c| c) {
            return (true, Some(apex));
        }
    }
    (false, None)
}

/// All architectures with at most `max_gates` slots over unordered pairs, one per
/// class of sequences that differ only by exchanging adjacent disjoint slots.
///
/// Output is ordered by length, then lexicographically.
pub fn enumerate_architectures(n: usize, max_gates: usize) -> Result<Vec<Architecture>> {
    if max_gates > MAX_ENUMERATION_GATES {
        return Err(Error::SearchBudget {
            what: format!("{max_gates} gates exceeds the enumeration limit of {MAX_ENUMERATION_GATES}"),
        });
    }
    let pairs: Vec<Slot> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
    let total: usize = (0..=max_gates as u32).map(|l| pairs.len().saturating_pow(l)).sum();
    if total > MAX_ENUMERATION_SEQUENCES {
        return Err(Error::SearchBudget { what: format!("{total} slot sequences for n = {n}, r = {max_gates}") });
    }
    let mut out = vec![Architecture::empty(n)];
    if pairs.is_empty() {
        return Ok(out);
    }
    let mut frontier: Vec<Vec<Slot>> = vec![Vec::new()];
    for _ in 0..max_gates {
        let mut next = Vec::new();
        for seq in &frontier {
            for &p in &pairs {
                let mut s = seq.clone();
                s.push(p);
                next.push(s);
            }
        }
        // Every prefix of a canonical sequence is canonical, so pruning the
        // frontier keeps the scan exhaustive.
        next.retain(|s| {
            let a = Architecture { n, slots: s.clone() };
            a.canonical() == a
        });
        out.extend(next.iter().map(|s| Architecture { n, slots: s.clone() }));
        frontier = next;
    }
    Ok(out)
}
