use std::sync::atomic::{AtomicU64, Ordering};

/// Operation counters used by the benchmark harness. Counts are exact and
/// deterministic for a given input: `matmul_mults` is the number of integer
/// multiplications performed inside matrix products, `transform_writes` the
/// number of table entries materialized by the intersection/parity
/// transforms. Atomics so that parallel sections can share one instance.
#[derive(Debug, Default)]
pub struct Counters {
    matmul_mults: AtomicU64,
    transform_writes: AtomicU64,
}

impl Counters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_matmul(&self, n: u64) {
        self.matmul_mults.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_transform(&self, n: u64) {
        self.transform_writes.fetch_add(n, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            matmul_mults: self.matmul_mults.load(Ordering::Relaxed),
            transform_writes: self.transform_writes.load(Ordering::Relaxed),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub matmul_mults: u64,
    pub transform_writes: u64,
}
