//! Convergence-set membership, the Lyapunov potential and the incremental
//! phase observers used by the engine.

use crate::error::{Error, Result};
use crate::protocol::{ValueSet, Variant, VoteProfile};

/// Whether the value sets form a chain ordered by size: for all `i, j`,
/// `|v_i| <= |v_j|` implies `v_i ⊆ v_j`. Empty sets are below everything and
/// are ignored.
pub fn is_in_convergence_set(states: &[ValueSet]) -> bool {
    let mut distinct: Vec<ValueSet> = states.iter().copied().filter(|v| !v.is_empty()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    is_chain(&mut distinct)
}

/// Chain test on distinct nonempty sets (reorders the slice).
fn is_chain(distinct: &mut [ValueSet]) -> bool {
    distinct.sort_unstable_by_key(|v| v.len());
    distinct
        .windows(2)
        .all(|w| w[0].len() < w[1].len() && w[0].is_subset(w[1]))
}

/// `n K^2 - sum_i |v_i|^2`.
pub fn lyapunov(states: &[ValueSet], k: usize) -> u64 {
    let n = states.len() as u64;
    let sq: u64 = states.iter().map(|v| (v.len() * v.len()) as u64).sum();
    n * (k * k) as u64 - sq
}

/// Which observers a run carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObserverSet {
    /// Minority-singleton extinction and majority-memory dissemination (binary only).
    pub binary_phases: bool,
    /// Convergence-set entry, projected pair hits and the Lyapunov trace.
    pub consolidation: bool,
    /// Time from which all readouts are correct.
    pub readout: bool,
}

/// Observer set for a run of `variant` on `profile`. Binary phase observers
/// need exactly two choices and a strict majority.
pub fn phase_observers(variant: Variant, profile: &VoteProfile, binary: bool) -> Result<ObserverSet> {
    let _ = variant;
    if binary && profile.choices() != 2 {
        return Err(Error::Config(format!(
            "binary phase observers need K = 2, got K = {}",
            profile.choices()
        )));
    }
    Ok(ObserverSet {
        binary_phases: binary && profile.ranking().is_some(),
        consolidation: true,
        readout: true,
    })
}

/// Incrementally maintained view of the global value-set configuration.
#[derive(Debug, Clone)]
pub(crate) struct ConsolidationTracker {
    k: usize,
    n: usize,
    counts: Vec<u32>,
    occupied: Vec<ValueSet>,
    occupied_changed: bool,
    scratch: Vec<ValueSet>,
    in_set: bool,
    pub tau_x: Option<f64>,
    pub exits: u32,
    /// `exclusive[a * k + b]`: nodes holding `a` but not `b`.
    exclusive: Vec<u32>,
    pub pair_hits: Vec<(usize, usize, Option<f64>)>,
    pair_open: usize,
    square_sum: u64,
    minority: Option<ValueSet>,
    pub tau1: Option<f64>,
}

impl ConsolidationTracker {
    pub fn new(values: &[ValueSet], k: usize, minority: Option<usize>) -> Self {
        let mut t = Self {
            k,
            n: values.len(),
            counts: vec![0; 1 << k],
            occupied: Vec::new(),
            occupied_changed: true,
            scratch: Vec::new(),
            in_set: false,
            tau_x: None,
            exits: 0,
            exclusive: vec![0; k * k],
            pair_hits: (0..k)
                .flat_map(|a| (a + 1..k).map(move |b| (a, b, None)))
                .collect(),
            pair_open: k * (k - 1) / 2,
            square_sum: 0,
            minority: minority.map(ValueSet::singleton),
            tau1: None,
        };
        for &v in values {
            t.add(v);
        }
        t.refresh(0.0);
        t
    }

    #[inline]
    fn add(&mut self, v: ValueSet) {
        let c = &mut self.counts[v.bits() as usize];
        *c += 1;
        if *c == 1 && !v.is_empty() {
            self.occupied.push(v);
            self.occupied_changed = true;
        }
        self.square_sum += (v.len() * v.len()) as u64;
        let full = ValueSet::full(self.k);
        for a in v.iter() {
            for b in full.difference(v).iter() {
                self.exclusive[a * self.k + b] += 1;
            }
        }
    }

    #[inline]
    fn remove(&mut self, v: ValueSet) {
        let c = &mut self.counts[v.bits() as usize];
        *c -= 1;
        if *c == 0 && !v.is_empty() {
            let pos = self.occupied.iter().position(|&o| o == v).expect("occupied set");
            self.occupied.swap_remove(pos);
            self.occupied_changed = true;
        }
        self.square_sum -= (v.len() * v.len()) as u64;
        let full = ValueSet::full(self.k);
        for a in v.iter() {
            for b in full.difference(v).iter() {
                self.exclusive[a * self.k + b] -= 1;
            }
        }
    }

    /// Applies a node's change from `old` to `new`.
    #[inline]
    pub fn change(&mut self, old: ValueSet, new: ValueSet) {
        if old != new {
            self.remove(old);
            self.add(new);
        }
    }

    /// Re-evaluates the observers after the changes of one event at time `t`.
    pub fn refresh(&mut self, t: f64) {
        if self.occupied_changed {
            self.occupied_changed = false;
            self.scratch.clear();
            self.scratch.extend_from_slice(&self.occupied);
            let chain = is_chain(&mut self.scratch);
            if self.in_set && !chain {
                self.exits += 1;
            }
            if chain && self.tau_x.is_none() {
                self.tau_x = Some(t);
            }
            self.in_set = chain;
        }
        if self.pair_open > 0 {
            let k = self.k;
            for (a, b, hit) in self.pair_hits.iter_mut() {
                if hit.is_none()
                    && (self.exclusive[*a * k + *b] == 0 || self.exclusive[*b * k + *a] == 0)
                {
                    *hit = Some(t);
                    self.pair_open -= 1;
                }
            }
        }
        if self.tau1.is_none() {
            if let Some(m) = self.minority {
                if self.counts[m.bits() as usize] == 0 {
                    self.tau1 = Some(t);
                }
            }
        }
    }

    pub fn in_convergence_set(&self) -> bool {
        self.in_set
    }

    pub fn lyapunov(&self) -> u64 {
        (self.n * self.k * self.k) as u64 - self.square_sum
    }
}
