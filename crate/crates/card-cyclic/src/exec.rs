//! Data-parallel driving loops with a sequential fallback.
//!
//! Heavy kernels (plan enumeration, Monte Carlo batches, exhaustive scans)
//! are expressed as a map over an index range followed by an order-free
//! merge. With the `parallel` feature the range is split across rayon
//! workers; without it the same closure runs in a plain loop. Merges are
//! exact integer/structural additions, so the result never depends on the
//! split.

/// True when the crate was built with the rayon backend.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// Map `0..len` and fold the results, merging partial accumulators with
/// `merge`. `new_acc` must produce a neutral accumulator.
pub fn map_reduce<T, New, Step, Merge>(len: u64, new_acc: New, step: Step, merge: Merge) -> T
where
    T: Send,
    New: Fn() -> T + Sync + Send,
    Step: Fn(&mut T, u64) + Sync + Send,
    Merge: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len)
            .into_par_iter()
            .fold(&new_acc, |mut acc, i| {
                step(&mut acc, i);
                acc
            })
            .reduce(&new_acc, merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = &merge;
        map_reduce_seq(len, new_acc, step)
    }
}

/// Sequential twin of [`map_reduce`]; always available so benches can
/// compare the two back ends within one build.
pub fn map_reduce_seq<T, New, Step>(len: u64, new_acc: New, step: Step) -> T
where
    New: Fn() -> T,
    Step: Fn(&mut T, u64),
{
    let mut acc = new_acc();
    for i in 0..len {
        step(&mut acc, i);
    }
    acc
}

/// Map `0..len` into a vector, preserving index order.
pub fn map_collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Elementwise `a[i] += b[i]`; the merge used by every tally kernel.
pub fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_reduce_matches_sequential() {
        let tally = |acc: &mut Vec<u64>, i: u64| acc[(i % 7) as usize] += i;
        let par = map_reduce(10_000, || vec![0u64; 7], tally, add_counts);
        let seq = map_reduce_seq(10_000, || vec![0u64; 7], tally);
        assert_eq!(par, seq);
    }

    #[test]
    fn map_collect_preserves_order() {
        let v = map_collect(100, |i| i * i);
        assert_eq!(v[7], 49);
        assert_eq!(v.len(), 100);
    }
}
