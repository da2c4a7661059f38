use alloc::vec::Vec;
use core::fmt;

/// A subset of facility indices.
///
/// Instances with at most 64 facilities use a bitmask; larger instances use
/// a sorted, deduplicated index list. The representation is fixed by the
/// facility count passed at construction, so sets built for the same
/// instance compare consistently and can key ordered maps.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FacilitySet(Repr);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Repr {
    Mask(u64),
    Sorted(Vec<u32>),
}

impl FacilitySet {
    /// Empty set for an instance with `n` facilities.
    pub fn empty(n: usize) -> Self {
        if n <= 64 {
            FacilitySet(Repr::Mask(0))
        } else {
            FacilitySet(Repr::Sorted(Vec::new()))
        }
    }

    /// Full set `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        if n <= 64 {
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            FacilitySet(Repr::Mask(mask))
        } else {
            FacilitySet(Repr::Sorted((0..n as u32).collect()))
        }
    }

    /// Build from arbitrary indices (deduplicated); indices must be `< n`.
    pub fn from_indices(n: usize, indices: &[u32]) -> Self {
        let mut set = Self::empty(n);
        for &i in indices {
            debug_assert!((i as usize) < n);
            set.insert(i);
        }
        set
    }

    pub fn contains(&self, i: u32) -> bool {
        match &self.0 {
            Repr::Mask(m) => i < 64 && (m >> i) & 1 == 1,
            Repr::Sorted(v) => v.binary_search(&i).is_ok(),
        }
    }

    pub fn insert(&mut self, i: u32) {
        match &mut self.0 {
            Repr::Mask(m) => {
                debug_assert!(i < 64);
                *m |= 1 << i;
            }
            Repr::Sorted(v) => {
                if let Err(pos) = v.binary_search(&i) {
                    v.insert(pos, i);
                }
            }
        }
    }

    /// Copy of this set with `i` added.
    pub fn with(&self, i: u32) -> Self {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn len(&self) -> usize {
        match &self.0 {
            Repr::Mask(m) => m.count_ones() as usize,
            Repr::Sorted(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset_of(&self, other: &FacilitySet) -> bool {
        match (&self.0, &other.0) {
            (Repr::Mask(a), Repr::Mask(b)) => a & !b == 0,
            _ => self.iter().all(|i| other.contains(i)),
        }
    }

    /// Iterate members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        let (mask, list): (u64, &[u32]) = match &self.0 {
            Repr::Mask(m) => (*m, &[]),
            Repr::Sorted(v) => (0, v.as_slice()),
        };
        let mut remaining = mask;
        let mut pos = 0usize;
        core::iter::from_fn(move || {
            if !list.is_empty() {
                let out = list.get(pos).copied();
                pos += 1;
                out
            } else if remaining != 0 {
                let i = remaining.trailing_zeros();
                remaining &= remaining - 1;
                Some(i)
            } else {
                None
            }
        })
    }

    /// Largest member, if any.
    pub fn max_index(&self) -> Option<u32> {
        match &self.0 {
            Repr::Mask(0) => None,
            Repr::Mask(m) => Some(63 - m.leading_zeros()),
            Repr::Sorted(v) => v.last().copied(),
        }
    }

    /// The bitmask when the set uses the mask representation.
    pub fn as_mask(&self) -> Option<u64> {
        match &self.0 {
            Repr::Mask(m) => Some(*m),
            Repr::Sorted(_) => None,
        }
    }

    pub fn to_indices(&self) -> Vec<u32> {
        self.iter().collect()
    }
}

fn fmt_as_set(set: &FacilitySet, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (k, i) in set.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{i}")?;
    }
    write!(f, "}}")
}

impl fmt::Debug for FacilitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_as_set(self, f)
    }
}

impl fmt::Display for FacilitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_as_set(self, f)
    }
}
