use crate::qsim::{Axis, Outcome, PairState, PauliOp, Side};

/// One shared pair plus what each party has done to it.
#[derive(Clone, Debug, PartialEq)]
pub struct Slot {
    pub state: PairState,
    /// Index in the original source sequence.
    pub origin: usize,
    pub alice_pauli: Option<PauliOp>,
    pub bob_pauli: Option<PauliOp>,
    pub alice_axis: Option<Axis>,
    pub alice_outcome: Option<Outcome>,
    pub bob_axis: Option<Axis>,
    pub bob_outcome: Option<Outcome>,
    pub consumed: bool,
}

impl Slot {
    fn new(origin: usize, state: PairState) -> Slot {
        Slot {
            state,
            origin,
            alice_pauli: None,
            bob_pauli: None,
            alice_axis: None,
            alice_outcome: None,
            bob_axis: None,
            bob_outcome: None,
            consumed: false,
        }
    }

    pub fn pauli(&self, side: Side) -> Option<PauliOp> {
        match side {
            Side::Alice => self.alice_pauli,
            Side::Bob => self.bob_pauli,
        }
    }
}

/// Ordered pairs shared between Alice and Bob.
///
/// Positions keep their source order; check samples are marked consumed and
/// dropped once by [`PairRegister::renumber`], after which positions are
/// `0..n` for the commitment.
#[derive(Clone, Debug, PartialEq)]
pub struct PairRegister {
    slots: Vec<Slot>,
    scrambled: [bool; 2],
    renumbered: bool,
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Alice => 0,
        Side::Bob => 1,
    }
}

impl PairRegister {
    pub fn from_states(states: impl IntoIterator<Item = PairState>) -> PairRegister {
        PairRegister {
            slots: states
                .into_iter()
                .enumerate()
                .map(|(i, s)| Slot::new(i, s))
                .collect(),
            scrambled: [false; 2],
            renumbered: false,
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub(crate) fn slot_mut(&mut self, k: usize) -> &mut Slot {
        &mut self.slots[k]
    }

    pub fn state(&self, k: usize) -> &PairState {
        &self.slots[k].state
    }

    pub fn unconsumed(&self) -> Vec<usize> {
        (0..self.slots.len())
            .filter(|&k| !self.slots[k].consumed)
            .collect()
    }

    pub fn unconsumed_count(&self) -> usize {
        self.slots.iter().filter(|s| !s.consumed).count()
    }

    pub fn is_scrambled(&self, side: Side) -> bool {
        self.scrambled[side_index(side)]
    }

    pub(crate) fn mark_scrambled(&mut self, side: Side) {
        self.scrambled[side_index(side)] = true;
    }

    pub fn is_renumbered(&self) -> bool {
        self.renumbered
    }

    /// Drops consumed positions; survivors become positions `0..n`.
    /// Returns false if it already happened.
    pub fn renumber(&mut self) -> bool {
        if self.renumbered {
            return false;
        }
        self.slots.retain(|s| !s.consumed);
        self.renumbered = true;
        true
    }

    pub fn map_unconsumed(&mut self, mut f: impl FnMut(&PairState) -> PairState) {
        for slot in self.slots.iter_mut().filter(|s| !s.consumed) {
            slot.state = f(&slot.state);
        }
    }

    /// Pauli record of one side over the current positions; `None` where
    /// that side has not acted.
    pub fn paulis(&self, side: Side) -> Vec<Option<PauliOp>> {
        self.slots.iter().map(|s| s.pauli(side)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renumber_once() {
        let mut reg = PairRegister::from_states((0..5).map(|_| PairState::singlet()));
        reg.slot_mut(1).consumed = true;
        reg.slot_mut(3).consumed = true;
        assert_eq!(reg.unconsumed(), vec![0, 2, 4]);
        assert!(reg.renumber());
        assert_eq!(reg.len(), 3);
        let origins: Vec<_> = reg.slots().iter().map(|s| s.origin).collect();
        assert_eq!(origins, vec![0, 2, 4]);
        assert!(!reg.renumber());
    }
}
