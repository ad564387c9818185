use std::collections::BTreeMap;

use super::ast::{LitmusTest, Operand};

/// Distance between the bases of two named locations. Address arithmetic
/// with an offset smaller than this never reaches another named location.
pub const ADDRESS_STRIDE: i64 = 1024;

/// Symbolic location name to base address.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AddressMap {
    bases: BTreeMap<String, i64>,
}

impl AddressMap {
    pub fn get(&self, name: &str) -> Option<i64> {
        self.bases.get(name).copied()
    }

    /// Reverse lookup.
    pub fn name_of(&self, addr: i64) -> Option<&str> {
        self.bases
            .iter()
            .find(|(_, &a)| a == addr)
            .map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.bases.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn resolve(&self, op: &Operand) -> Option<i64> {
        match op {
            Operand::Int(v) => Some(*v),
            Operand::Sym(s) => self.get(s),
        }
    }
}

/// Assign every symbolic name a base address. Names are taken in sorted
/// order and the k-th name (from 0) gets `(k + 1) * ADDRESS_STRIDE`; address
/// 0 stays unnamed so that a pointer to a location never equals the initial
/// memory value.
pub fn bind_addresses(test: &LitmusTest) -> AddressMap {
    let mut names: Vec<&str> = test.symbols();
    names.sort_unstable();
    names.dedup();
    let bases = names
        .into_iter()
        .enumerate()
        .map(|(k, n)| (n.to_string(), (k as i64 + 1) * ADDRESS_STRIDE))
        .collect();
    AddressMap { bases }
}
