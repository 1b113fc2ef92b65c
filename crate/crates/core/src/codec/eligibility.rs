//! Ordered set of one sign class of the residual, keyed by magnitude.
//!
//! Late in a long encode most coordinates clear the threshold, so the
//! eligible range is walked in key order rather than popped off a heap and
//! pushed back.

use std::cmp::Ordering;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug)]
struct Key(f64);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Coordinates with `orientation * residual[idx] > 0`, ordered by that
/// magnitude and then by index.
#[derive(Clone, Debug)]
pub(crate) struct EligibilitySet {
    set: BTreeSet<(Key, usize)>,
    orientation: f64,
}

impl EligibilitySet {
    pub fn build(residual: &[f64], orientation: f64) -> Self {
        let set = residual
            .iter()
            .enumerate()
            .filter_map(|(idx, &r)| {
                let key = orientation * r;
                (key > 0.0).then_some((Key(key), idx))
            })
            .collect();
        Self { set, orientation }
    }

    pub fn max(&self) -> Option<f64> {
        self.set.last().map(|(k, _)| k.0)
    }

    fn at_least(&self, thr: f64) -> impl DoubleEndedIterator<Item = &(Key, usize)> {
        self.set.range((Key(thr), 0)..)
    }

    /// How many indices clear `thr` and pass `keep`.
    pub fn count_at_least(&self, thr: f64, mut keep: impl FnMut(usize) -> bool) -> usize {
        self.at_least(thr).filter(|&&(_, idx)| keep(idx)).count()
    }

    /// The `k`-th index that clears `thr` and passes `keep`, counting from
    /// the largest magnitude.
    pub fn nth_at_least(&self, thr: f64, k: usize, mut keep: impl FnMut(usize) -> bool) -> Option<usize> {
        self.at_least(thr)
            .rev()
            .map(|&(_, idx)| idx)
            .filter(|&idx| keep(idx))
            .nth(k)
    }

    /// Whether any index clears `thr` and passes `keep`. Scans down from
    /// the top, so it usually stops at the first entry.
    pub fn any_at_least(&self, thr: f64, mut keep: impl FnMut(usize) -> bool) -> bool {
        self.at_least(thr).rev().any(|&(_, idx)| keep(idx))
    }

    /// Move `idx` from its old residual value to its new one.
    pub fn update(&mut self, idx: usize, old: f64, new: f64) {
        let old_key = self.orientation * old;
        if old_key > 0.0 {
            self.set.remove(&(Key(old_key), idx));
        }
        let new_key = self.orientation * new;
        if new_key > 0.0 {
            self.set.insert((Key(new_key), idx));
        }
    }
}
