//! Bounded worker pool over a slice, with results returned in input order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Applies `f` to every element on at most `width` threads. `on_done`
/// receives the running count of finished items.
pub fn map_ordered<T, R, F, D>(items: &[T], width: usize, f: F, on_done: D) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
    D: Fn(usize) + Sync,
{
    let width = width.clamp(1, items.len().max(1));
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..width {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().expect("pool slots")[i] = Some(r);
                on_done(done.fetch_add(1, Ordering::SeqCst) + 1);
            });
        }
    });
    slots
        .into_inner()
        .expect("pool slots")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}
