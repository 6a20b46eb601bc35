//! Batch evaluation. With the `parallel` feature (on by default) batches run
//! on the rayon thread pool, otherwise on the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every item, preserving order.
pub fn map_batch<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

/// Applies `f` to every item on the calling thread.
pub fn map_sequential<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Indices of the items failing `check`, in ascending order.
pub fn failures<T, F>(items: &[T], check: F) -> Vec<usize>
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    map_batch(items, |x| check(x)).into_iter().enumerate().filter(|(_, ok)| !ok).map(|(i, _)| i).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_and_sequential_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        assert_eq!(map_batch(&xs, |x| x * x), map_sequential(&xs, |x| x * x));
        assert_eq!(failures(&xs, |x| x % 250 != 3), vec![3, 253, 503, 753]);
    }
}
