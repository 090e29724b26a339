use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use super::{Instance, InstanceConfig, SimError};

/// Shared table of running instances. Each instance sits behind its own
/// mutex, so commands to one instance serialize while distinct instances
/// proceed in parallel.
#[derive(Debug)]
pub struct Registry {
    next_id: AtomicU64,
    instances: RwLock<BTreeMap<u64, Arc<Mutex<Instance>>>>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::new()
    }
}

impl Registry {
    pub fn new() -> Self {
        Self {
            next_id: AtomicU64::new(1),
            instances: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn create(&self, config: InstanceConfig) -> Result<u64, SimError> {
        config.validate()?;
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let inst = Instance::new(id, config)?;
        self.instances
            .write()
            .unwrap_or_else(PoisonError::into_inner)
            .insert(id, Arc::new(Mutex::new(inst)));
        Ok(id)
    }

    pub fn get(&self, id: u64) -> Result<Arc<Mutex<Instance>>, SimError> {
        self.instances
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .get(&id)
            .cloned()
            .ok_or(SimError::UnknownInstance(id))
    }

    /// Runs `f` with exclusive access to one instance.
    pub fn with<R>(&self, id: u64, f: impl FnOnce(&mut Instance) -> R) -> Result<R, SimError> {
        let inst = self.get(id)?;
        let mut guard = inst.lock().unwrap_or_else(PoisonError::into_inner);
        Ok(f(&mut guard))
    }

    pub fn stop(&self, id: u64) -> Result<(), SimError> {
        self.instances
            .write()
            .unwrap_or_else(PoisonError::into_inner)
            .remove(&id)
            .map(|_| ())
            .ok_or(SimError::UnknownInstance(id))
    }

    pub fn ids(&self) -> Vec<u64> {
        self.instances
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .keys()
            .copied()
            .collect()
    }
}
