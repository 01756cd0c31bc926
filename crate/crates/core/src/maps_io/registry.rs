use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::grid::MapGrid;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("map {0:?} is already registered")]
    Duplicate(String),
    #[error("unknown map name {0:?}")]
    Unknown(String),
}

/// Named maps shared between threads. Reads run concurrently; registration
/// takes the write lock.
#[derive(Debug, Default)]
pub struct MapRegistry {
    maps: RwLock<BTreeMap<String, Arc<MapGrid>>>,
}

impl MapRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `map` under `name` (which also becomes the map's name).
    pub fn register(&self, name: impl Into<String>, map: MapGrid) -> Result<Arc<MapGrid>, RegistryError> {
        let name = name.into();
        let mut maps = self.maps.write().expect("registry lock poisoned");
        if maps.contains_key(&name) {
            return Err(RegistryError::Duplicate(name));
        }
        let map = Arc::new(map.with_name(name.clone()));
        maps.insert(name, map.clone());
        Ok(map)
    }

    /// Registers a map under its own name.
    pub fn register_named(&self, map: MapGrid) -> Result<Arc<MapGrid>, RegistryError> {
        let name = map.name().unwrap_or_default().to_string();
        self.register(name, map)
    }

    pub fn get(&self, name: &str) -> Option<Arc<MapGrid>> {
        self.maps.read().expect("registry lock poisoned").get(name).cloned()
    }

    pub fn resolve(&self, name: &str) -> Result<Arc<MapGrid>, RegistryError> {
        self.get(name).ok_or_else(|| RegistryError::Unknown(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.maps.read().expect("registry lock poisoned").contains_key(name)
    }

    pub fn names(&self) -> Vec<String> {
        self.maps.read().expect("registry lock poisoned").keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.maps.read().expect("registry lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapgen::gen_random;

    #[test]
    fn register_then_resolve() {
        let reg = MapRegistry::new();
        let m = gen_random(9, 7, 0.3, 1).unwrap();
        reg.register("r1", m.clone()).unwrap();
        let back = reg.resolve("r1").unwrap();
        assert_eq!(*back, m);
        assert_eq!(back.name(), Some("r1"));
        assert_eq!(reg.register("r1", m), Err(RegistryError::Duplicate("r1".into())));
        assert_eq!(reg.resolve("nope").unwrap_err(), RegistryError::Unknown("nope".into()));
        assert_eq!(reg.names(), vec!["r1".to_string()]);
    }

    #[test]
    fn concurrent_reads() {
        let reg = Arc::new(MapRegistry::new());
        reg.register("a", MapGrid::empty(3, 3).unwrap()).unwrap();
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let reg = reg.clone();
                std::thread::spawn(move || reg.resolve("a").unwrap().num_free())
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), 9);
        }
    }
}
