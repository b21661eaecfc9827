//! Thin switch between rayon and sequential iteration.
//!
//! Every helper preserves output order, and no helper performs a reduction:
//! callers sum the collected values sequentially so results do not depend on
//! the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`, in parallel when enabled.
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
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

/// Applies `f(chunk_index, chunk)` to consecutive chunks of `chunk_len` items.
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk_len).enumerate().for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk_len).enumerate().for_each(|(i, c)| f(i, c));
    }
}

/// Like [`for_each_chunk_mut`] but hands each worker a reusable scratch value.
pub(crate) fn for_each_chunk_mut_init<T, S, I, F>(data: &mut [T], chunk_len: usize, init: I, f: F)
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk_len).for_each_init(init, f);
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = init();
        data.chunks_mut(chunk_len).for_each(|c| f(&mut scratch, c));
    }
}

/// Per-chunk map over a slice, collected in order.
pub(crate) fn map_chunks<T, R, F>(data: &[T], chunk_len: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&[T]) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks(chunk_len).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks(chunk_len).map(f).collect()
    }
}
