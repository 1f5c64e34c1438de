//! Minimal discrete-event core: a time-ordered queue with deterministic
//! tie-breaking.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Where, relative to a sample taken at the same time, an event lands.
///
/// A sample at time `t` observes every `At` event scheduled for `t` but none
/// of the `After` events, so `At` models closed interval starts and `After`
/// closed interval ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    At,
    After,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instant {
    pub time: f64,
    pub phase: Phase,
}

impl Instant {
    pub fn at(time: f64) -> Self {
        Instant {
            time,
            phase: Phase::At,
        }
    }

    pub fn after(time: f64) -> Self {
        Instant {
            time,
            phase: Phase::After,
        }
    }

    /// True when a sample taken at `t` already sees this instant.
    pub fn visible_at(&self, t: f64) -> bool {
        *self <= Instant::at(t)
    }
}

impl Eq for Instant {}

impl PartialOrd for Instant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Instant {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.phase.cmp(&other.phase))
    }
}

struct Entry<E> {
    at: Instant,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.at == other.at && self.seq == other.seq
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.at.cmp(&other.at).then(self.seq.cmp(&other.seq))
    }
}

/// Pending events ordered by instant, then by insertion order.
pub struct EventQueue<E> {
    heap: BinaryHeap<Reverse<Entry<E>>>,
    next_seq: u64,
}

impl<E> Default for EventQueue<E> {
    fn default() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            next_seq: 0,
        }
    }
}

impl<E> EventQueue<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, at: Instant, event: E) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Entry { at, seq, event }));
    }

    pub fn peek(&self) -> Option<Instant> {
        self.heap.peek().map(|Reverse(e)| e.at)
    }

    pub fn pop(&mut self) -> Option<(Instant, E)> {
        self.heap.pop().map(|Reverse(e)| (e.at, e.event))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
