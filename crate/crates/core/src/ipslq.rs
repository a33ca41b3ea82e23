//! Incremental PSLQ: run the PSLQ loop on the shortest suffix window first
//! and, whenever the window is certified relation-free up to the norm bound,
//! extend it one coordinate to the left without discarding `H`, `A` or `B`.

use crate::arith::{PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::pslq::{drive, IterationEvent, RelationOutcome, WindowPolicy, Workspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageOutcome {
    Extended,
    Relation,
    Bound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    /// 0-based index of the first coordinate in play.
    pub window_start: usize,
    /// Length of the suffix `x[window_start..]`.
    pub suffix_len: usize,
    pub iterations: u64,
    pub swaps: u64,
    pub outcome: StageOutcome,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageTrace {
    records: Vec<StageRecord>,
}

impl StageTrace {
    pub(crate) fn push(&mut self, record: StageRecord) {
        debug_assert!(self
            .records
            .last()
            .map_or(true, |prev| prev.outcome == StageOutcome::Extended
                && record.window_start + 1 == prev.window_start));
        self.records.push(record);
    }

    pub fn records(&self) -> &[StageRecord] {
        &self.records
    }

    pub fn total_swaps(&self) -> u64 {
        self.records.iter().map(|r| r.swaps).sum()
    }

    pub fn last(&self) -> Option<&StageRecord> {
        self.records.last()
    }
}

/// Moves the window start one coordinate to the left. `H`, `A` and `B` are
/// left untouched.
pub fn extend_window(ws: &mut Workspace) -> Result<()> {
    let k = ws.window_start();
    if k == 0 {
        return Err(Error::CannotExtend);
    }
    ws.set_window_start(k - 1);
    Ok(())
}

/// Incremental PSLQ. Returns an integer relation for `x` or a certificate
/// that none of 2-norm `<= bound` exists.
pub fn ipslq(x: &[Real], bound: &Real, gamma: &Real, ctx: &PrecisionContext) -> Result<RelationOutcome> {
    ipslq_observed(x, bound, gamma, ctx, &mut |_, _| {})
}

/// [`ipslq`] with a callback after every iteration.
pub fn ipslq_observed(
    x: &[Real],
    bound: &Real,
    gamma: &Real,
    ctx: &PrecisionContext,
    observer: &mut dyn FnMut(&Workspace, &IterationEvent),
) -> Result<RelationOutcome> {
    let mut ws = Workspace::new(x, bound, gamma, ctx)?;
    drive(&mut ws, WindowPolicy::Incremental, observer)
}
