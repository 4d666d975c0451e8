use serde::{Deserialize, Serialize};

/// How a suite fans its samples out over workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    Parallel,
}

/// Map a closure over the inputs, in order. The parallel path keeps the
/// output order of the inputs, so residual folds are deterministic either
/// way. Without the `parallel` feature both paths run sequentially.
pub fn run_samples<T, R, F>(exec: Execution, inputs: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    match exec {
        Execution::Sequential => inputs.iter().map(&f).collect(),
        Execution::Parallel => par_map(inputs, f),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(inputs: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    use rayon::prelude::*;
    inputs.par_iter().map(&f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(inputs: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    inputs.iter().map(&f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential_order() {
        let inputs: Vec<u64> = (0..500).collect();
        let f = |x: &u64| x.wrapping_mul(2654435761) ^ (x >> 3);
        let seq = run_samples(Execution::Sequential, &inputs, f);
        let par = run_samples(Execution::Parallel, &inputs, f);
        assert_eq!(seq, par);
    }
}
