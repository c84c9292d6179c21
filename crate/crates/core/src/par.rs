//! Data-parallel helpers. With the `parallel` feature off everything runs on
//! the calling thread, which is what the benches compare against.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`, in parallel when enabled.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps over a slice.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Calls `f(i, chunk)` on consecutive chunks of `data` of length `size`.
pub fn chunks_mut<T, F>(data: &mut [T], size: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(size).enumerate().for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(size).enumerate().for_each(|(i, c)| f(i, c));
    }
}

/// Sum of `f(i)` over `0..n`. The reduction order is fixed so results do not
/// depend on the thread count.
pub fn sum_range<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    const BLOCK: usize = 1024;
    let blocks = n.div_ceil(BLOCK);
    let partial = map_range(blocks, |b| {
        let hi = ((b + 1) * BLOCK).min(n);
        (b * BLOCK..hi).map(&f).sum::<f64>()
    });
    partial.iter().sum()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers_match_sequential() {
        let v = map_range(100, |i| i * i);
        assert_eq!(v[9], 81);
        let w = map_slice(&v, |x| x + 1);
        assert_eq!(w[0], 1);
        let mut d = vec![0usize; 10];
        chunks_mut(&mut d, 3, |i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(d, vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 3]);
        let s = sum_range(5000, |i| i as f64);
        assert_eq!(s, 4999.0 * 5000.0 / 2.0);
    }
}
