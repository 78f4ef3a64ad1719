//! Execution strategy for data-parallel loops.
//!
//! With the `parallel` feature the work is spread over the current rayon
//! pool; without it, or with [`Exec::Sequential`], it runs in order on the
//! calling thread. Results are always collected in index order, so both
//! strategies return identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `0..len`, preserving order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..len).into_par_iter().map(f).collect(),
            _ => (0..len).map(f).collect(),
        }
    }
}

/// Index of the largest key; ties go to the lowest index and NaN keys
/// never win against a number.
pub fn argmax_by_key<T>(items: &[T], key: impl Fn(&T) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, it) in items.iter().enumerate() {
        let k = key(it);
        match best {
            Some((_, bk)) if k.partial_cmp(&bk) != Some(std::cmp::Ordering::Greater) => {}
            _ => best = Some((i, k)),
        }
    }
    best.map(|(i, _)| i)
}

/// Index of the smallest key; ties go to the lowest index.
pub fn argmin_by_key<T>(items: &[T], key: impl Fn(&T) -> f64) -> Option<usize> {
    argmax_by_key(items, |x| -key(x))
}
