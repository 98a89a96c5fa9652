/// How bulk per-point work is scheduled.
///
/// `Parallel` runs on the rayon pool when the `parallel` feature is on and
/// quietly degrades to `Sequential` otherwise. Results are identical either
/// way; only the wall time differs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Map `f` over `0..len`, keeping order.
    pub fn map_range<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Fill `out` in fixed-size chunks: chunk `i` is `out[i*width..(i+1)*width]`.
    /// Each worker gets its own state from `init`.
    pub fn fill_chunks<S, I, F>(self, out: &mut [u8], width: usize, init: I, f: F)
    where
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize, &mut [u8]) + Sync + Send,
    {
        if width == 0 {
            return;
        }
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            out.par_chunks_mut(width)
                .enumerate()
                .for_each_init(&init, |s, (i, c)| f(s, i, c));
            return;
        }
        let mut s = init();
        out.chunks_mut(width).enumerate().for_each(|(i, c)| f(&mut s, i, c));
    }

    /// Sort with the parallel sorter when available.
    pub fn sort_by<T, F>(self, v: &mut [T], cmp: F)
    where
        T: Send,
        F: Fn(&T, &T) -> std::cmp::Ordering + Sync,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            v.par_sort_unstable_by(cmp);
            return;
        }
        v.sort_unstable_by(cmp);
    }
}
