//! Thread pool sized by `TRACEBRACKET_THREADS` (unset or `0` means one
//! thread per core).

use std::sync::OnceLock;

use rayon::{ThreadPool, ThreadPoolBuilder};

pub const THREADS_VAR: &str = "TRACEBRACKET_THREADS";

pub fn thread_count() -> usize {
    let requested = std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if requested == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        requested
    }
}

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        ThreadPoolBuilder::new()
            .num_threads(thread_count())
            .build()
            .expect("failed to build thread pool")
    })
}

/// Runs `f` inside the shared pool so that rayon iterators in it respect the cap.
pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    pool().install(f)
}
