use lru::LruCache;

use crate::model::ComplexAmp;

/// Default number of cached amplitudes.
pub const DEFAULT_CAPACITY: usize = 1 << 20;

/// Bounded map from `(pc, state bits)` to amplitude with strict LRU eviction.
///
/// A capacity of zero disables caching: lookups always miss without being
/// counted and nothing is stored.
#[derive(Debug)]
pub struct AmpCache {
    capacity: usize,
    map: LruCache<(usize, u64), ComplexAmp>,
    hits: u64,
    misses: u64,
}

impl AmpCache {
    pub fn new(capacity: usize) -> Self {
        // Unbounded backing map with manual eviction, so a large capacity does
        // not preallocate.
        Self { capacity, map: LruCache::unbounded(), hits: 0, misses: 0 }
    }

    pub fn disabled() -> Self {
        Self::new(0)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_enabled(&self) -> bool {
        self.capacity > 0
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    #[inline]
    pub fn get(&mut self, pc: usize, bits: u64) -> Option<ComplexAmp> {
        if self.capacity == 0 {
            return None;
        }
        match self.map.get(&(pc, bits)) {
            Some(&v) => {
                self.hits += 1;
                Some(v)
            }
            None => {
                self.misses += 1;
                None
            }
        }
    }

    #[inline]
    pub fn put(&mut self, pc: usize, bits: u64, amp: ComplexAmp) {
        if self.capacity == 0 {
            return;
        }
        self.map.put((pc, bits), amp);
        while self.map.len() > self.capacity {
            self.map.pop_lru();
        }
    }

    pub fn contains(&self, pc: usize, bits: u64) -> bool {
        self.map.contains(&(pc, bits))
    }

    /// Drops all entries; hit and miss counters are kept.
    pub fn clear(&mut self) {
        self.map.clear();
    }
}
