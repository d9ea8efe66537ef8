//! Replays a recorded event log and re-checks the value-set invariants.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::ValueSet;
use crate::sim::{is_in_convergence_set, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Invariant {
    /// The logged `before` sets match the replayed state.
    LogContinuity,
    SizePreservation,
    /// Potential drops exactly when neither set contains the other.
    Lyapunov,
    ConvergenceSetPermanence,
    ProjectionIdentity,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::LogContinuity => "log continuity",
            Invariant::SizePreservation => "size preservation",
            Invariant::Lyapunov => "Lyapunov decrease",
            Invariant::ConvergenceSetPermanence => "convergence-set permanence",
            Invariant::ProjectionIdentity => "projection identity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFailure {
    /// Index of the offending event; `None` for whole-run checks.
    pub event: Option<usize>,
    pub invariant: Invariant,
    pub detail: String,
}

impl fmt::Display for AuditFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.event {
            Some(e) => write!(f, "event {e}: {} violated: {}", self.invariant, self.detail),
            None => write!(f, "{} violated: {}", self.invariant, self.detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub events: usize,
    /// First entry into the convergence set, replayed.
    pub tau_x: Option<f64>,
    /// First hitting time of each two-choice projection, pairs `(a, b)`, `a < b`.
    pub pair_hits: Vec<(usize, usize, Option<f64>)>,
    pub failures: Vec<AuditFailure>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sq(v: ValueSet) -> i64 {
    (v.len() * v.len()) as i64
}

/// Whether the projection onto `{a, b}` is in its convergence set: no node
/// holds `a` without `b` while another holds `b` without `a`.
fn projection_converged(states: &[ValueSet], a: usize, b: usize) -> bool {
    let only_a = states.iter().any(|v| v.contains(a) && !v.contains(b));
    let only_b = states.iter().any(|v| v.contains(b) && !v.contains(a));
    !(only_a && only_b)
}

/// Replays `traj`'s event log from its initial sets. Needs a complete log.
pub fn audit_trace(traj: &Trajectory) -> Result<AuditReport> {
    let Some(events) = traj.events.as_ref() else {
        return Err(Error::Config("trajectory has no event log".into()));
    };
    if traj.events_truncated {
        return Err(Error::Config("event log was truncated".into()));
    }
    let k = traj.k;
    let mut state = traj.initial_sets.clone();
    let mut failures = Vec::new();
    let mut fail = |event: Option<usize>, invariant, detail: String| {
        failures.push(AuditFailure {
            event,
            invariant,
            detail,
        })
    };

    let mut pair_hits: Vec<(usize, usize, Option<f64>)> = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b, None)))
        .collect();
    let mark_pairs = |state: &[ValueSet], t: f64, hits: &mut Vec<(usize, usize, Option<f64>)>| {
        for (a, b, hit) in hits.iter_mut() {
            if hit.is_none() && projection_converged(state, *a, *b) {
                *hit = Some(t);
            }
        }
    };
    mark_pairs(&state, 0.0, &mut pair_hits);
    let mut tau_x = is_in_convergence_set(&state).then_some(0.0);

    for (idx, e) in events.iter().enumerate() {
        let (i, j) = (e.i as usize, e.j as usize);
        if state[i] != e.before[0] || state[j] != e.before[1] {
            fail(
                Some(idx),
                Invariant::LogContinuity,
                format!(
                    "logged before {:?} but replay holds [{:?}, {:?}]",
                    e.before, state[i], state[j]
                ),
            );
        }
        for c in 0..k {
            let count = |p: [ValueSet; 2]| p.iter().filter(|v| v.contains(c)).count();
            if count(e.before) != count(e.after) {
                fail(
                    Some(idx),
                    Invariant::SizePreservation,
                    format!("choice {c}: {:?} -> {:?}", e.before, e.after),
                );
                break;
            }
        }
        let [vi, vj] = e.before;
        let nested = vi.is_subset(vj) || vj.is_subset(vi);
        let gain = sq(e.after[0]) + sq(e.after[1]) - sq(vi) - sq(vj);
        if (nested && gain != 0) || (!nested && gain <= 0) {
            fail(
                Some(idx),
                Invariant::Lyapunov,
                format!("{:?} -> {:?} changes the potential by {}", e.before, e.after, -gain),
            );
        }
        state[i] = e.after[0];
        state[j] = e.after[1];
        let inside = is_in_convergence_set(&state);
        match tau_x {
            Some(_) if !inside => fail(
                Some(idx),
                Invariant::ConvergenceSetPermanence,
                "left the convergence set".into(),
            ),
            None if inside => tau_x = Some(e.time),
            _ => {}
        }
        if pair_hits.iter().any(|p| p.2.is_none()) {
            mark_pairs(&state, e.time, &mut pair_hits);
        }
    }

    let max_pair = pair_hits
        .iter()
        .try_fold(0.0f64, |acc, p| p.2.map(|t| acc.max(t)));
    if tau_x.is_some() && max_pair != tau_x {
        fail(
            None,
            Invariant::ProjectionIdentity,
            format!("tau_x = {tau_x:?} but the slowest projection hit at {max_pair:?}"),
        );
    }
    if tau_x != traj.tau_x {
        fail(
            None,
            Invariant::ProjectionIdentity,
            format!("replayed tau_x {tau_x:?} differs from recorded {:?}", traj.tau_x),
        );
    }
    Ok(AuditReport {
        events: events.len(),
        tau_x,
        pair_hits,
        failures,
    })
}
