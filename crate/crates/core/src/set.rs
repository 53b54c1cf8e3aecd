//! Bitmask sets of request ids.

use std::fmt;

/// A set of request ids below 64, stored as a bitmask.
///
/// MTS states are even-sized `RequestSet`s; ordering by the raw mask is the
/// deterministic tie-break used throughout the solvers.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RequestSet(pub u64);

/// Largest number of requests representable in a `RequestSet`.
pub const MAX_REQUESTS: usize = 64;

impl RequestSet {
    pub const EMPTY: RequestSet = RequestSet(0);

    /// The set `{0, .., n-1}`.
    pub fn prefix(n: usize) -> RequestSet {
        if n >= 64 {
            RequestSet(u64::MAX)
        } else {
            RequestSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(u: usize) -> RequestSet {
        RequestSet(1u64 << u)
    }

    pub fn pair(u: usize, v: usize) -> RequestSet {
        RequestSet((1u64 << u) | (1u64 << v))
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> RequestSet {
        RequestSet(ids.into_iter().fold(0u64, |m, u| m | (1u64 << u)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_even(self) -> bool {
        self.len() % 2 == 0
    }

    pub fn contains(self, u: usize) -> bool {
        u < 64 && self.0 & (1u64 << u) != 0
    }

    pub fn insert(&mut self, u: usize) {
        self.0 |= 1u64 << u;
    }

    pub fn remove(&mut self, u: usize) {
        self.0 &= !(1u64 << u);
    }

    pub fn union(self, o: RequestSet) -> RequestSet {
        RequestSet(self.0 | o.0)
    }

    pub fn intersection(self, o: RequestSet) -> RequestSet {
        RequestSet(self.0 & o.0)
    }

    pub fn difference(self, o: RequestSet) -> RequestSet {
        RequestSet(self.0 & !o.0)
    }

    pub fn sym_diff(self, o: RequestSet) -> RequestSet {
        RequestSet(self.0 ^ o.0)
    }

    pub fn is_subset(self, o: RequestSet) -> bool {
        self.0 & !o.0 == 0
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let u = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(u)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Serialized as the sorted list of member ids.
impl serde::Serialize for RequestSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> serde::Deserialize<'de> for RequestSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = ids.iter().find(|&&i| i >= MAX_REQUESTS) {
            return Err(serde::de::Error::custom(format!("request id {bad} out of range")));
        }
        Ok(RequestSet::from_ids(ids))
    }
}

impl fmt::Debug for RequestSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An MTS state: an even-sized set of arrived requests.
pub type State = RequestSet;
