//! Runs independent trials on a pool of worker threads and returns results in
//! trial order, so the output does not depend on the worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// Evaluates `task(i)` for `i in 0..count` on `workers` threads.
pub fn run_indexed<T: Send>(count: usize, workers: usize, task: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = workers.clamp(1, count.max(1));
    if workers == 1 {
        return (0..count).map(task).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..count).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = task(i);
                slots.lock().expect("no worker panicked while holding the lock")[i] = Some(value);
            });
        }
    });
    slots.into_inner().expect("workers finished").into_iter().map(|v| v.expect("every index ran")).collect()
}

/// Like [`run_indexed`] for fallible tasks; returns the error of the lowest
/// failing index.
pub fn try_run_indexed<T: Send, E: Send>(
    count: usize,
    workers: usize,
    task: impl Fn(usize) -> Result<T, E> + Sync,
) -> Result<Vec<T>, E> {
    run_indexed(count, workers, task).into_iter().collect()
}

/// Wall-clock milliseconds of `f` when `enabled`, otherwise zero.
pub fn timed<T>(enabled: bool, f: impl FnOnce() -> T) -> (T, u64) {
    if enabled {
        let start = Instant::now();
        let v = f();
        (v, start.elapsed().as_millis() as u64)
    } else {
        (f(), 0)
    }
}
