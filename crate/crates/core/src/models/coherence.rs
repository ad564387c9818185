//! Partial coherence order over the live stores of one address.
//!
//! Each store buffer orders its stores to an address oldest first; the union
//! of those orders, closed transitively, must stay a strict partial order.
//! Edges between consecutive entries suffice for the acyclicity check.

use std::collections::{BTreeMap, BTreeSet};

use crate::isa::{Addr, ProcId, Tag};
use crate::state::MachineState;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoherenceGraph {
    nodes: BTreeSet<Tag>,
    edges: BTreeSet<(Tag, Tag)>,
}

impl CoherenceGraph {
    /// Add one buffer's per-address list, oldest first.
    pub fn add_list(&mut self, tags: &[Tag]) {
        self.nodes.extend(tags.iter().copied());
        for w in tags.windows(2) {
            self.edges.insert((w[0], w[1]));
        }
    }

    /// The graph for address `a` in `state`, optionally with tag `extra`
    /// appended as the youngest entry of processor `extra_to`.
    fn build(state: &MachineState, a: Addr, extra: Option<(Tag, ProcId)>) -> Self {
        let mut g = CoherenceGraph::default();
        for (j, p) in state.procs.iter().enumerate() {
            let mut list: Vec<Tag> = p.sb.entries_for(a).filter_map(|e| e.tag).collect();
            if let Some((t, to)) = extra {
                if to == j {
                    list.push(t);
                }
            }
            g.add_list(&list);
        }
        g
    }

    pub fn of_state(state: &MachineState, a: Addr) -> Self {
        Self::build(state, a, None)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Tag> + '_ {
        self.nodes.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Tag, Tag)> + '_ {
        self.edges.iter().copied()
    }

    /// Kahn's algorithm: acyclic iff every node can be removed in
    /// topological order. A self-loop never loses its in-degree.
    pub fn is_acyclic(&self) -> bool {
        let mut indeg: BTreeMap<Tag, usize> = self.nodes.iter().map(|&t| (t, 0)).collect();
        let mut succ: BTreeMap<Tag, Vec<Tag>> = BTreeMap::new();
        for &(u, v) in &self.edges {
            *indeg.entry(v).or_default() += 1;
            indeg.entry(u).or_default();
            succ.entry(u).or_default().push(v);
        }
        let mut ready: Vec<Tag> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&t, _)| t)
            .collect();
        let mut removed = 0;
        while let Some(u) = ready.pop() {
            removed += 1;
            for &v in succ.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(&v).expect("edge target is a node");
                *d -= 1;
                if *d == 0 {
                    ready.push(v);
                }
            }
        }
        removed == indeg.len()
    }
}

/// Whether copying the store tagged `t` (to address `a`) into processor `j`'s
/// buffer keeps the coherence order acyclic. A buffer already holding `t`
/// is rejected outright: the copy would order `t` before itself.
pub fn no_cycle(state: &MachineState, a: Addr, t: Tag, j: ProcId) -> bool {
    if state.procs[j].sb.has(t) {
        return false;
    }
    CoherenceGraph::build(state, a, Some((t, j))).is_acyclic()
}
