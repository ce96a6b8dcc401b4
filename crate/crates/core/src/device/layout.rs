use std::collections::BTreeMap;

use super::coupling::CouplingMap;
use crate::error::{Error, Result};

/// Injective map from virtual qubits `0..n` into physical qubits `0..m`.
///
/// Both directions are stored and kept in sync.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layout {
    v2p: Vec<usize>,
    p2v: Vec<Option<usize>>,
}

impl Layout {
    pub fn trivial(n: usize) -> Layout {
        Layout {
            v2p: (0..n).collect(),
            p2v: (0..n).map(Some).collect(),
        }
    }

    /// Build from `v2p[v] = p` over `physical` qubits.
    pub fn from_v2p(v2p: Vec<usize>, physical: usize) -> Result<Layout> {
        let mut p2v = vec![None; physical];
        for (v, &p) in v2p.iter().enumerate() {
            if p >= physical {
                return Err(Error::InvalidLayout(format!(
                    "virtual {v} maps to {p}, outside 0..{physical}"
                )));
            }
            if let Some(other) = p2v[p] {
                return Err(Error::InvalidLayout(format!(
                    "virtual {other} and {v} both map to physical {p}"
                )));
            }
            p2v[p] = Some(v);
        }
        Ok(Layout { v2p, p2v })
    }

    /// Both directions as given, unchecked; [`Layout::is_consistent`] reports mismatches.
    pub fn from_raw_parts(v2p: Vec<usize>, p2v: Vec<Option<usize>>) -> Layout {
        Layout { v2p, p2v }
    }

    pub fn p2v_slice(&self) -> &[Option<usize>] {
        &self.p2v
    }

    /// Build from `(virtual, physical)` pairs; virtual indices must be `0..n`.
    pub fn from_pairs(pairs: &[(usize, usize)], physical: usize) -> Result<Layout> {
        let mut map = BTreeMap::new();
        for &(v, p) in pairs {
            if map.insert(v, p).is_some() {
                return Err(Error::InvalidLayout(format!("virtual {v} listed twice")));
            }
        }
        if map.keys().copied().ne(0..map.len()) {
            return Err(Error::InvalidLayout("virtual qubits must be 0..n".into()));
        }
        Layout::from_v2p(map.into_values().collect(), physical)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.v2p.iter().copied().enumerate().collect()
    }

    pub fn from_json(text: &str, physical: usize) -> Result<Layout> {
        let pairs: Vec<[usize; 2]> = serde_json::from_str(text)?;
        let pairs: Vec<(usize, usize)> = pairs.into_iter().map(|[v, p]| (v, p)).collect();
        Layout::from_pairs(&pairs, physical)
    }

    pub fn to_json(&self) -> String {
        let pairs: Vec<[usize; 2]> = self.pairs().into_iter().map(|(v, p)| [v, p]).collect();
        serde_json::to_string(&pairs).expect("plain data serializes")
    }

    pub fn num_virtual(&self) -> usize {
        self.v2p.len()
    }

    pub fn num_physical(&self) -> usize {
        self.p2v.len()
    }

    pub fn v2p(&self, v: usize) -> usize {
        self.v2p[v]
    }

    pub fn p2v(&self, p: usize) -> Option<usize> {
        self.p2v[p]
    }

    pub fn v2p_slice(&self) -> &[usize] {
        &self.v2p
    }

    pub fn is_bijection(&self) -> bool {
        self.v2p.len() == self.p2v.len()
    }

    /// Both directions agree and no physical qubit is claimed twice.
    pub fn is_consistent(&self) -> bool {
        let forward = self.v2p.iter().enumerate().all(|(v, &p)| self.p2v.get(p) == Some(&Some(v)));
        let claimed = self.p2v.iter().filter(|p| p.is_some()).count();
        forward && claimed == self.v2p.len()
    }

    /// Assign fresh virtual qubits `n..m` to the unused physical qubits in ascending order.
    pub fn with_ancillas(&self) -> Layout {
        let mut out = self.clone();
        for p in 0..out.p2v.len() {
            if out.p2v[p].is_none() {
                out.p2v[p] = Some(out.v2p.len());
                out.v2p.push(p);
            }
        }
        out
    }

    /// Exchange the virtual occupants of physical qubits `p1` and `p2`.
    pub fn swap_physical(&mut self, p1: usize, p2: usize) -> Result<()> {
        let m = self.p2v.len();
        if p1 >= m || p2 >= m {
            return Err(Error::QubitOutOfRange {
                qubit: p1.max(p2),
                size: m,
            });
        }
        self.p2v.swap(p1, p2);
        if let Some(v) = self.p2v[p1] {
            self.v2p[v] = p1;
        }
        if let Some(v) = self.p2v[p2] {
            self.v2p[v] = p2;
        }
        Ok(())
    }

    /// Permutation `perm[p] = p'` taking each physical position under `self`
    /// to the position the same virtual qubit holds under `other`.
    pub fn transition_to(&self, other: &Layout) -> Result<Vec<usize>> {
        if !self.is_bijection() || self.v2p.len() != other.v2p.len() || !other.is_bijection() {
            return Err(Error::InvalidLayout("transition needs two bijections of equal size".into()));
        }
        Ok((0..self.p2v.len())
            .map(|p| other.v2p[self.p2v[p].expect("bijection")])
            .collect())
    }
}

/// Identity placement of `qreg` virtual qubits onto the first physical qubits.
pub fn simple_layout(qreg: usize, cmap: &CouplingMap) -> Result<Layout> {
    if qreg == 0 {
        return Err(Error::EmptyRegister);
    }
    if qreg > cmap.size() {
        return Err(Error::Precondition(format!(
            "register of {qreg} qubits does not fit a device of {}",
            cmap.size()
        )));
    }
    Layout::from_v2p((0..qreg).collect(), cmap.size())
}

/// Functional form of [`Layout::swap_physical`].
pub fn layout_swap(layout: &Layout, p1: usize, p2: usize) -> Result<Layout> {
    let mut out = layout.clone();
    out.swap_physical(p1, p2)?;
    Ok(out)
}
