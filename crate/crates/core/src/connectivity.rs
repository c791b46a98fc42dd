//! Transfer-matrix states: non-crossing partitions of the sites of a time
//! slice, with per-block boundary flags and per-block bridge marks.
//!
//! Sites are numbered `0..m`. In single-slice mode `m = W` and site `W - 1` is
//! on the rim. In double-slice mode `m = 2W`: site `i < W` is the current
//! slice and site `2W - 1 - i` remembers row `i` of slice 0, so that the
//! natural order `0..2W` is the circular order of all points.

use crate::error::{Error, Result};
use std::collections::HashMap;

/// Hard limit on sites per state, set by the packed encoding.
pub const MAX_SITES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConnectivityState {
    labels: Vec<u8>,
    flags: u32,
    bridges: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinOutcome {
    AlreadyJoined,
    Merged(ConnectivityState),
    /// Two bridges would merge.
    Forbidden,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetachOutcome {
    Kept(ConnectivityState),
    /// The old block vanished; `flagged` tells which cluster weight applies.
    Closed {
        state: ConnectivityState,
        flagged: bool,
    },
    /// A bridge would terminate.
    Forbidden,
}

impl ConnectivityState {
    /// Builds a state from explicit blocks; every site must appear once.
    pub fn from_blocks(m: usize, blocks: &[Vec<usize>], flags: &[bool], bridges: &[bool]) -> Result<Self> {
        if m == 0 || m > MAX_SITES {
            return Err(Error::InvalidSpec(format!("{m} sites out of range")));
        }
        if flags.len() != blocks.len() || bridges.len() != blocks.len() {
            return Err(Error::InvalidSpec("one flag and bridge mark per block".into()));
        }
        let mut labels = vec![u8::MAX; m];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidSpec("empty block".into()));
            }
            for &s in block {
                if s >= m || labels[s] != u8::MAX {
                    return Err(Error::InvalidSpec(format!("site {s} invalid or repeated")));
                }
                labels[s] = b as u8;
            }
        }
        if labels.contains(&u8::MAX) {
            return Err(Error::InvalidSpec("every site needs a block".into()));
        }
        let mut f = 0;
        let mut br = 0;
        for b in 0..blocks.len() {
            f |= (flags[b] as u32) << b;
            br |= (bridges[b] as u32) << b;
        }
        Ok(Self::canonical(labels, f, br))
    }

    /// All sites in separate, unmarked blocks; `flagged(site)` sets flags.
    pub fn singletons(m: usize, flagged: impl Fn(usize) -> bool) -> Self {
        let labels: Vec<u8> = (0..m as u8).collect();
        let flags = (0..m).filter(|&s| flagged(s)).fold(0, |f, s| f | 1 << s);
        ConnectivityState {
            labels,
            flags,
            bridges: 0,
        }
    }

    fn canonical(labels: Vec<u8>, flags: u32, bridges: u32) -> Self {
        let mut map = [u8::MAX; MAX_SITES + 1];
        let mut next = 0u8;
        let mut out = Vec::with_capacity(labels.len());
        let (mut f, mut br) = (0, 0);
        for &l in &labels {
            let l = l as usize;
            if map[l] == u8::MAX {
                map[l] = next;
                f |= (flags >> l & 1) << next;
                br |= (bridges >> l & 1) << next;
                next += 1;
            }
            out.push(map[l]);
        }
        ConnectivityState {
            labels: out,
            flags: f,
            bridges: br,
        }
    }

    pub fn sites(&self) -> usize {
        self.labels.len()
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    pub fn block_of(&self, site: usize) -> usize {
        self.labels[site] as usize
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (s, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(s);
        }
        out
    }

    pub fn is_flagged(&self, block: usize) -> bool {
        self.flags >> block & 1 == 1
    }

    pub fn is_bridge(&self, block: usize) -> bool {
        self.bridges >> block & 1 == 1
    }

    pub fn bridge_count(&self) -> usize {
        self.bridges.count_ones() as usize
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    /// The bridge block reaching the highest site, if any.
    pub fn outermost_bridge(&self) -> Option<usize> {
        self.labels
            .iter()
            .rev()
            .map(|&l| l as usize)
            .find(|&b| self.is_bridge(b))
    }

    pub fn with_flag(&self, block: usize) -> Self {
        let mut s = self.clone();
        s.flags |= 1 << block;
        s
    }

    pub fn without_flags(&self) -> Self {
        let mut s = self.clone();
        s.flags = 0;
        s
    }

    pub fn with_bridge(&self, block: usize) -> Self {
        let mut s = self.clone();
        s.bridges |= 1 << block;
        s
    }

    pub fn is_non_crossing(&self) -> bool {
        let m = self.sites();
        for a in 0..m {
            for b in a + 1..m {
                if self.labels[b] == self.labels[a] {
                    continue;
                }
                for c in b + 1..m {
                    if self.labels[c] != self.labels[a] {
                        continue;
                    }
                    if (c + 1..m).any(|d| self.labels[d] == self.labels[b]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether block `inner` sits strictly between two sites of block `outer`.
    pub fn is_nested_in(&self, inner: usize, outer: usize) -> bool {
        if inner == outer {
            return false;
        }
        let pos = |b: usize| self.labels.iter().enumerate().filter(move |(_, &l)| l as usize == b).map(|(s, _)| s);
        let (lo, hi) = (pos(outer).min().unwrap(), pos(outer).max().unwrap());
        pos(inner).any(|s| lo < s && s < hi)
    }

    /// Merges the blocks of `a` and `b`; flags and bridge marks are OR-ed.
    pub fn join(&self, a: usize, b: usize) -> JoinOutcome {
        let (la, lb) = (self.labels[a], self.labels[b]);
        if la == lb {
            return JoinOutcome::AlreadyJoined;
        }
        if self.is_bridge(la as usize) && self.is_bridge(lb as usize) {
            return JoinOutcome::Forbidden;
        }
        let mut labels = self.labels.clone();
        for l in labels.iter_mut() {
            if *l == lb {
                *l = la;
            }
        }
        let fold = |bits: u32| bits | (bits >> lb & 1) << la;
        JoinOutcome::Merged(Self::canonical(labels, fold(self.flags), fold(self.bridges)))
    }

    /// Removes `a` from its block and re-inserts it as a fresh singleton,
    /// flagged iff `on_rim`.
    pub fn detach(&self, a: usize, on_rim: bool) -> DetachOutcome {
        let la = self.labels[a];
        let alone = self.labels.iter().filter(|&&l| l == la).count() == 1;
        if alone && self.is_bridge(la as usize) {
            return DetachOutcome::Forbidden;
        }
        let fresh = self.block_count() as u8;
        let mut labels = self.labels.clone();
        labels[a] = fresh;
        let mut flags = self.flags & !(1 << fresh);
        let mut bridges = self.bridges;
        if on_rim {
            flags |= 1 << fresh;
        }
        if alone {
            let flagged = self.is_flagged(la as usize);
            flags &= !(1 << la);
            bridges &= !(1 << la);
            DetachOutcome::Closed {
                state: Self::canonical(labels, flags, bridges),
                flagged,
            }
        } else {
            DetachOutcome::Kept(Self::canonical(labels, flags, bridges))
        }
    }

    /// Packs the state into 128 bits: 4 bits of label per site, then flags,
    /// bridge marks and the site count.
    pub fn encode(&self) -> u128 {
        let mut code = 0u128;
        for (s, &l) in self.labels.iter().enumerate() {
            code |= (l as u128) << (4 * s);
        }
        code | (self.flags as u128) << 64 | (self.bridges as u128) << 80 | (self.sites() as u128) << 96
    }

    pub fn decode(code: u128) -> Self {
        let m = (code >> 96 & 0xff) as usize;
        let labels = (0..m).map(|s| (code >> (4 * s) & 0xf) as u8).collect();
        ConnectivityState {
            labels,
            flags: (code >> 64 & 0xffff) as u32,
            bridges: (code >> 80 & 0xffff) as u32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisMode {
    /// Double-slice states on `2W` points.
    ExactCyclic,
    /// Single-slice states with the given number of bridges.
    Sector(usize),
}

/// Ordered, duplicate-free list of states with lookup by encoding.
#[derive(Clone, Debug, Default)]
pub struct StateBasis {
    states: Vec<ConnectivityState>,
    index: HashMap<u128, usize>,
}

impl StateBasis {
    /// Sorts by encoding and removes duplicates.
    pub fn from_states(states: impl IntoIterator<Item = ConnectivityState>) -> Self {
        let mut codes: Vec<u128> = states.into_iter().map(|s| s.encode()).collect();
        codes.sort_unstable();
        codes.dedup();
        let index = codes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        StateBasis {
            states: codes.into_iter().map(ConnectivityState::decode).collect(),
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[ConnectivityState] {
        &self.states
    }

    pub fn get(&self, i: usize) -> &ConnectivityState {
        &self.states[i]
    }

    pub fn index_of(&self, s: &ConnectivityState) -> Option<usize> {
        self.index.get(&s.encode()).copied()
    }
}

/// All non-crossing partitions of `m` points as label vectors.
pub fn non_crossing_partitions(m: usize) -> Vec<Vec<u8>> {
    fn extend(cur: &mut Vec<u8>, blocks: u8, m: usize, out: &mut Vec<Vec<u8>>) {
        let i = cur.len();
        if i == m {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            // putting i into an old block b must not close over a block that
            // also has a site before b's last site
            let ok = b == blocks || {
                let last = cur.iter().rposition(|&l| l == b).unwrap();
                !(last + 1..i).any(|j| {
                    let c = cur[j];
                    c != b && cur[..last].contains(&c)
                })
            };
            if ok {
                cur.push(b);
                extend(cur, blocks.max(b + 1), m, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(m), 0, m, &mut out);
    out
}

/// Enumerates the states of a mode combinatorially.
///
/// Without flags all flags are clear. With flags, every block may carry one
/// except that blocks holding a rim site must carry it and blocks enclosed by
/// (or inward of) the outermost bridge cannot. In sector mode the bridges are
/// the blocks not nested inside any other block that are chosen as winding.
pub fn enumerate_basis(width: usize, mode: BasisMode, with_flags: bool) -> Result<StateBasis> {
    if width == 0 {
        return Err(Error::InvalidSpec("width must be at least 1".into()));
    }
    let m = match mode {
        BasisMode::ExactCyclic => 2 * width,
        BasisMode::Sector(ell) if ell > width => {
            return Err(Error::SectorOutOfRange { ell, width });
        }
        BasisMode::Sector(_) => width,
    };
    if m > MAX_SITES {
        return Err(Error::SizeGuard(format!("{m} sites per state")));
    }
    let rim: Vec<usize> = match mode {
        BasisMode::ExactCyclic => vec![width - 1, width],
        BasisMode::Sector(_) => vec![width - 1],
    };
    let mut out = Vec::new();
    for labels in non_crossing_partitions(m) {
        let base = ConnectivityState::canonical(labels, 0, 0);
        let nb = base.block_count();
        let bridge_sets: Vec<u32> = match mode {
            BasisMode::ExactCyclic => vec![0],
            BasisMode::Sector(ell) => {
                let free: Vec<usize> = (0..nb)
                    .filter(|&b| (0..nb).all(|o| !base.is_nested_in(b, o)))
                    .collect();
                subsets_of_size(&free, ell)
            }
        };
        for bridges in bridge_sets {
            let s = ConnectivityState {
                bridges,
                ..base.clone()
            };
            if !with_flags {
                out.push(s);
                continue;
            }
            let outer = s.outermost_bridge();
            let reach = outer.map(|o| s.blocks()[o].iter().copied().max().unwrap());
            let forced: u32 = rim.iter().fold(0, |f, &r| f | 1 << s.block_of(r));
            let allowed: u32 = (0..nb)
                .filter(|&b| match (outer, reach) {
                    (Some(o), Some(hi)) => b == o || s.blocks()[b].iter().all(|&x| x > hi),
                    _ => true,
                })
                .fold(0, |f, b| f | 1 << b);
            if forced & !allowed != 0 {
                continue;
            }
            let optional = allowed & !forced;
            let mut sub = optional;
            loop {
                out.push(ConnectivityState {
                    flags: forced | sub,
                    ..s.clone()
                });
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & optional;
            }
        }
    }
    Ok(StateBasis::from_states(out))
}

fn subsets_of_size(items: &[usize], k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let n = items.len();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|&i| mask >> i & 1 == 1).fold(0, |f, i| f | 1 << items[i]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sector_counts() {
        let n = |w, ell| enumerate_basis(w, BasisMode::Sector(ell), false).unwrap().len();
        assert_eq!(n(1, 0), 1);
        assert_eq!(n(2, 0), 2);
        assert_eq!(n(3, 0), 5);
        assert_eq!(n(1, 1), 1);
        assert_eq!(n(2, 1), 3);
        assert_eq!(n(2, 2), 1);
        assert!(matches!(
            enumerate_basis(2, BasisMode::Sector(3), false),
            Err(Error::SectorOutOfRange { ell: 3, width: 2 })
        ));
    }

    #[test]
    fn catalan_counts() {
        let cat = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (m, &c) in cat.iter().enumerate().skip(1) {
            assert_eq!(non_crossing_partitions(m).len(), c);
        }
    }

    #[test]
    fn join_semantics() {
        let s = ConnectivityState::singletons(3, |i| i == 2);
        let JoinOutcome::Merged(t) = s.join(1, 2) else { panic!() };
        assert!(t.connected(1, 2));
        assert!(t.is_flagged(t.block_of(1)));
        assert_eq!(t.join(1, 2), JoinOutcome::AlreadyJoined);
        let JoinOutcome::Merged(u) = s.join(0, 1) else { panic!() };
        assert!(!u.is_flagged(u.block_of(0)));
        let b = s.with_bridge(0).with_bridge(1);
        assert_eq!(b.join(0, 1), JoinOutcome::Forbidden);
    }

    #[test]
    fn detach_semantics() {
        let s = ConnectivityState::singletons(2, |i| i == 1);
        match s.detach(0, false) {
            DetachOutcome::Closed { flagged, .. } => assert!(!flagged),
            other => panic!("{other:?}"),
        }
        match s.detach(1, true) {
            DetachOutcome::Closed { state, flagged } => {
                assert!(flagged);
                assert!(state.is_flagged(state.block_of(1)));
            }
            other => panic!("{other:?}"),
        }
        let JoinOutcome::Merged(t) = s.join(0, 1) else { panic!() };
        assert!(matches!(t.detach(0, false), DetachOutcome::Kept(_)));
        assert_eq!(s.with_bridge(0).detach(0, false), DetachOutcome::Forbidden);
    }

    proptest! {
        #[test]
        fn operations_preserve_invariants(w in 1usize..6, ops in prop::collection::vec((0usize..6, any::<bool>()), 0..30)) {
            let mut s = ConnectivityState::singletons(w, |i| i + 1 == w);
            for (site, is_join) in ops {
                let a = site % w;
                if is_join && a + 1 < w {
                    if let JoinOutcome::Merged(t) = s.join(a, a + 1) { s = t; }
                } else {
                    s = match s.detach(a, a + 1 == w) {
                        DetachOutcome::Kept(t) | DetachOutcome::Closed { state: t, .. } => t,
                        DetachOutcome::Forbidden => s,
                    };
                }
                prop_assert!(s.is_non_crossing());
                prop_assert!(s.is_flagged(s.block_of(w - 1)));
                prop_assert_eq!(ConnectivityState::decode(s.encode()), s.clone());
            }
        }
    }

    #[test]
    fn round_trip_over_bases() {
        for w in 1..=4 {
            for mode in [BasisMode::ExactCyclic, BasisMode::Sector(0), BasisMode::Sector(1)] {
                let b = enumerate_basis(w, mode, true).unwrap();
                for s in b.states() {
                    assert_eq!(&ConnectivityState::decode(s.encode()), s);
                    assert!(s.is_non_crossing());
                    assert_eq!(b.index_of(s).map(|i| b.get(i)), Some(s));
                }
            }
        }
    }

    #[test]
    fn from_blocks_validates() {
        assert!(ConnectivityState::from_blocks(3, &[vec![0, 2], vec![1]], &[true, false], &[false, false]).is_ok());
        assert!(ConnectivityState::from_blocks(3, &[vec![0, 2]], &[true], &[false]).is_err());
    }
}
