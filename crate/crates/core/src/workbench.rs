use std::sync::{Arc, Mutex};

use crate::arith::{PrimeList, PrimeTables};
use crate::error::{Error, Result};
use crate::genset::prime_bound;
use crate::theta::ThetaSpec;

/// Shared prime tables plus the worker count used by parallel reductions.
///
/// Tables grow on demand and are shared behind `Arc`, so a workbench can be
/// reused across many counting and density calls.
#[derive(Debug)]
pub struct Workbench {
    workers: usize,
    primes: Mutex<Option<Arc<PrimeList>>>,
    tables: Mutex<Option<Arc<PrimeTables>>>,
}

impl Default for Workbench {
    fn default() -> Self {
        Workbench::new(1)
    }
}

impl Workbench {
    pub fn new(workers: usize) -> Self {
        Workbench {
            workers: workers.max(1),
            primes: Mutex::new(None),
            tables: Mutex::new(None),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// A prime list reaching at least `bound`.
    pub fn primes_up_to(&self, bound: u64) -> Result<Arc<PrimeList>> {
        let mut slot = self.primes.lock().expect("prime cache poisoned");
        if let Some(list) = slot.as_ref() {
            if list.limit() >= bound {
                return Ok(Arc::clone(list));
            }
        }
        let list = Arc::new(PrimeList::new(bound.max(2))?);
        *slot = Some(Arc::clone(&list));
        Ok(list)
    }

    /// Primes sufficient to enumerate `B_θ(x)`.
    pub fn primes_for(&self, spec: &ThetaSpec, x: u64) -> Result<Arc<PrimeList>> {
        self.primes_up_to(prime_bound(spec, x))
    }

    /// An spf table reaching at least `limit`.
    pub fn tables_up_to(&self, limit: u64) -> Result<Arc<PrimeTables>> {
        let mut slot = self.tables.lock().expect("table cache poisoned");
        if let Some(t) = slot.as_ref() {
            if t.limit() >= limit {
                return Ok(Arc::clone(t));
            }
        }
        let t = Arc::new(PrimeTables::new(limit.max(2))?);
        *slot = Some(Arc::clone(&t));
        Ok(t)
    }

    pub(crate) fn run<R: Send>(&self, job: impl FnOnce() -> R + Send) -> Result<R> {
        if self.workers == 1 {
            return Ok(job());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
        Ok(pool.install(job))
    }
}
