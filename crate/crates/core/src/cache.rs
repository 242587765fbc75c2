//! Populate-once caches shared across threads.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

/// Map from keys to lazily computed, immutable values.
///
/// The lock is held only to find or create the slot; the value itself is
/// computed outside it, and concurrent requests for the same key block on the
/// slot's `OnceLock` so each value is built exactly once.
pub struct Cache<K, V> {
    slots: Mutex<HashMap<K, Arc<OnceLock<Arc<V>>>>>,
}

impl<K: Eq + Hash + Clone, V> Cache<K, V> {
    pub fn new() -> Self {
        Self { slots: Mutex::new(HashMap::new()) }
    }

    pub fn get_or_init(&self, key: &K, init: impl FnOnce() -> V) -> Arc<V> {
        let slot = {
            let mut map = self.slots.lock().expect("cache lock poisoned");
            map.entry(key.clone()).or_insert_with(|| Arc::new(OnceLock::new())).clone()
        };
        slot.get_or_init(|| Arc::new(init())).clone()
    }
}

impl<K: Eq + Hash + Clone, V> Default for Cache<K, V> {
    fn default() -> Self {
        Self::new()
    }
}
