//! Monte Carlo summary statistics with a deterministic pairwise reduction.

use crate::scalar::Real;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate<T> {
    pub mean: T,
    /// `sample std / sqrt(n)`; `None` when fewer than two samples exist.
    pub stderr: Option<T>,
    pub n: u64,
}

/// Streaming mean/variance accumulator (Welford) that merges exactly, so a
/// fixed batch tree yields the same result regardless of evaluation order.
#[derive(Debug, Clone, Copy)]
pub struct RunningMoments<T> {
    n: u64,
    mean: T,
    m2: T,
}

impl<T: Real> Default for RunningMoments<T> {
    fn default() -> Self {
        RunningMoments {
            n: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }
}

impl<T: Real> RunningMoments<T> {
    pub fn push(&mut self, x: T) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / T::of(self.n as f64);
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let (na, nb) = (T::of(self.n as f64), T::of(other.n as f64));
        let nt = T::of(n as f64);
        let delta = other.mean - self.mean;
        RunningMoments {
            n,
            mean: self.mean + delta * nb / nt,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nt,
        }
    }

    pub fn estimate(&self) -> MonteCarloEstimate<T> {
        let stderr = if self.n >= 2 {
            let n = T::of(self.n as f64);
            Some((self.m2 / (n - T::one()) / n).sqrt())
        } else {
            None
        };
        MonteCarloEstimate {
            mean: self.mean,
            stderr,
            n: self.n,
        }
    }
}

/// Pairwise (tree) merge of per-batch accumulators.
pub fn merge_tree<T: Real>(mut stats: Vec<RunningMoments<T>>) -> RunningMoments<T> {
    if stats.is_empty() {
        return RunningMoments::default();
    }
    while stats.len() > 1 {
        let mut next = Vec::with_capacity(stats.len().div_ceil(2));
        let mut it = stats.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.merge(b)),
                None => next.push(a),
            }
        }
        stats = next;
    }
    stats.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut whole = RunningMoments::default();
        for &x in &xs {
            whole.push(x);
        }
        let batches: Vec<RunningMoments<f64>> = xs
            .chunks(64)
            .map(|chunk| {
                let mut b = RunningMoments::default();
                for &x in chunk {
                    b.push(x);
                }
                b
            })
            .collect();
        let merged = merge_tree(batches);
        let (a, b) = (whole.estimate(), merged.estimate());
        assert_relative_eq!(a.mean, b.mean, max_relative = 1e-12);
        assert_relative_eq!(a.stderr.unwrap(), b.stderr.unwrap(), max_relative = 1e-10);
        assert_eq!(a.n, 1000);
    }

    #[test]
    fn single_sample_has_no_stderr() {
        let mut m = RunningMoments::default();
        m.push(3.0f64);
        let e = m.estimate();
        assert_eq!(e.mean, 3.0);
        assert_eq!(e.stderr, None);
        assert_eq!(e.n, 1);
    }
}
