//! Store buffer and invalidation buffer.
//!
//! Both keep their entries in one vector in insertion order. The per-address
//! list of a buffer is that order restricted to one address, so TSO's
//! globally-oldest dequeue and the per-address `rmOldest` of PSO/WMM read the
//! same storage.

use super::{Addr, Tag, Timestamp, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SbEntry {
    pub addr: Addr,
    pub value: Value,
    /// Creation time of the store (WMM-D); 0 elsewhere.
    pub sts: Timestamp,
    /// Identity shared by all copies of a store (WMM-S).
    pub tag: Option<Tag>,
}

impl SbEntry {
    pub fn new(addr: Addr, value: Value) -> Self {
        SbEntry {
            addr,
            value,
            sts: 0,
            tag: None,
        }
    }
}

/// Pending stores, oldest first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StoreBuffer {
    entries: Vec<SbEntry>,
}

impl StoreBuffer {
    pub fn enq(&mut self, entry: SbEntry) {
        self.entries.push(entry);
    }

    /// Remove and return the globally oldest store.
    pub fn deq(&mut self) -> Option<SbEntry> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.entries.remove(0))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn exist(&self, a: Addr) -> bool {
        self.entries.iter().any(|e| e.addr == a)
    }

    pub fn youngest(&self, a: Addr) -> Option<&SbEntry> {
        self.entries.iter().rev().find(|e| e.addr == a)
    }

    pub fn oldest(&self, a: Addr) -> Option<&SbEntry> {
        self.entries.iter().find(|e| e.addr == a)
    }

    /// Some address present in the buffer, or `None` (ε) when empty.
    pub fn any_addr(&self) -> Option<Addr> {
        self.entries.first().map(|e| e.addr)
    }

    /// Every distinct address, in order of each address's oldest store. The
    /// explorer fires one dequeue per element.
    pub fn addrs(&self) -> Vec<Addr> {
        let mut out: Vec<Addr> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.addr) {
                out.push(e.addr);
            }
        }
        out
    }

    /// Remove and return the oldest store to `a`.
    pub fn rm_oldest(&mut self, a: Addr) -> Option<SbEntry> {
        let i = self.entries.iter().position(|e| e.addr == a)?;
        Some(self.entries.remove(i))
    }

    pub fn has(&self, t: Tag) -> bool {
        self.entries.iter().any(|e| e.tag == Some(t))
    }

    /// Stores to `a`, oldest first.
    pub fn entries_for(&self, a: Addr) -> impl Iterator<Item = &SbEntry> {
        self.entries.iter().filter(move |e| e.addr == a)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SbEntry> {
        self.entries.iter()
    }

    pub(crate) fn iter_mut(&mut self) -> impl Iterator<Item = &mut SbEntry> {
        self.entries.iter_mut()
    }
}

/// A stale value a processor may still observe. `[ts_lo, ts_hi]` is the
/// visibility interval used by WMM-D; `ts_hi` is also the global time at
/// which the entry was inserted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IbEntry {
    pub addr: Addr,
    pub value: Value,
    pub ts_lo: Timestamp,
    pub ts_hi: Timestamp,
}

impl IbEntry {
    pub fn new(addr: Addr, value: Value) -> Self {
        IbEntry {
            addr,
            value,
            ts_lo: 0,
            ts_hi: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvalidationBuffer {
    entries: Vec<IbEntry>,
}

impl InvalidationBuffer {
    pub fn insert(&mut self, entry: IbEntry) {
        self.entries.push(entry);
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn rm_addr(&mut self, a: Addr) {
        self.entries.retain(|e| e.addr != a);
    }

    pub fn exist(&self, a: Addr) -> bool {
        self.entries.iter().any(|e| e.addr == a)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Stale values for `a` in insertion order.
    pub fn entries_for(&self, a: Addr) -> impl Iterator<Item = &IbEntry> {
        self.entries.iter().filter(move |e| e.addr == a)
    }

    pub fn iter(&self) -> impl Iterator<Item = &IbEntry> {
        self.entries.iter()
    }

    /// `getRandom(a)` with the choice made explicit: take the `choice`-th
    /// stale value for `a` and drop it together with every value for `a`
    /// inserted before it.
    pub fn get_random(&mut self, a: Addr, choice: usize) -> Option<Value> {
        let positions: Vec<usize> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.addr == a)
            .map(|(i, _)| i)
            .collect();
        let cut = *positions.get(choice)?;
        let value = self.entries[cut].value;
        let mut idx = 0;
        self.entries.retain(|e| {
            let keep = !(e.addr == a && idx <= cut);
            idx += 1;
            keep
        });
        Some(value)
    }

    /// `random(a)` with the choice made explicit; `None` plays the role of ε.
    pub fn random(&self, a: Addr, choice: usize) -> Option<IbEntry> {
        self.entries_for(a).nth(choice).copied()
    }

    /// Remove stale values for `a` inserted while the global clock was below
    /// `ts`.
    pub fn rm_older(&mut self, a: Addr, ts: Timestamp) {
        self.entries.retain(|e| !(e.addr == a && e.ts_hi < ts));
    }
}
