//! Monte Carlo accumulation, reproducible parallel drivers and
//! Kolmogorov-Smirnov helpers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Running mean and sum of squared deviations (Welford), mergeable with
/// Chan's formula.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += d * nb / n as f64;
        self.m2 += other.m2 + d * d * na * nb / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self, seed: u64) -> MCEstimate {
        MCEstimate { mean: self.mean, stderr: (self.variance() / self.n as f64).sqrt(), n_samples: self.n, seed }
    }
}

/// The generator for sample `index`: ChaCha8 keyed by `seed`, on stream
/// `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples per reduction chunk; fixed so the result does not depend on the
/// number of worker threads.
pub const CHUNK: u64 = 1024;

/// Runs `draw(rng, out)` for sample indices `0..n` in the current rayon
/// pool and reduces each of the `width` outputs in a fixed order.
pub fn parallel_moments<F>(n: u64, seed: u64, width: usize, draw: F) -> Result<Vec<Moments>>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) -> Result<()> + Sync,
{
    if n < 2 {
        return invalid(format!("Monte Carlo needs at least 2 samples, got {n}"));
    }
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Result<Vec<Moments>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Moments::default(); width];
            let mut out = vec![0.0; width];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut rng = sample_rng(seed, i);
                draw(&mut rng, &mut out)?;
                for (a, &v) in acc.iter_mut().zip(&out) {
                    a.push(v);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for p in partial {
        for (t, m) in total.iter_mut().zip(p?) {
            t.merge(&m);
        }
    }
    Ok(total)
}

/// Runs `draw` for indices `0..n` and returns the draws in index order.
pub fn parallel_draws<F>(n: u64, seed: u64, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    (0..n).into_par_iter().map(|i| draw(&mut sample_rng(seed, i))).collect()
}

/// Asymptotic Kolmogorov critical constant `c(alpha) = sqrt(-ln(alpha/2)/2)`.
pub fn ks_critical(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// One-sample KS statistic `sup |F_n - F|`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Whether a one-sample test of size `n` accepts at significance `alpha`.
pub fn ks_accepts(stat: f64, n: usize, alpha: f64) -> bool {
    stat <= ks_critical(alpha) / (n as f64).sqrt()
}

/// Whether a two-sample test accepts at significance `alpha`.
pub fn ks_two_sample_accepts(stat: f64, n: usize, m: usize, alpha: f64) -> bool {
    let (n, m) = (n as f64, m as f64);
    stat <= ks_critical(alpha) * ((n + m) / (n * m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn welford_and_merge() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..300].iter().for_each(|&x| a.push(x));
        xs[300..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean - all.mean).abs() < 1e-12);
        assert!((a.m2 - all.m2).abs() < 1e-9);
        let mean = xs.iter().sum::<f64>() / 1000.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0;
        assert!((all.variance() - var).abs() < 1e-10);
    }

    #[test]
    fn reproducible_across_pools() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                parallel_moments(5000, 42, 1, |rng, out| {
                    out[0] = rng.random::<f64>();
                    Ok(())
                })
                .unwrap()
            })
        };
        let one = run(1);
        assert_eq!(one, run(2));
        assert_eq!(one, run(8));
        assert_eq!(one[0].n, 5000);
    }

    #[test]
    fn streams_differ() {
        let a: u64 = sample_rng(1, 0).random();
        let b: u64 = sample_rng(1, 1).random();
        let c: u64 = sample_rng(2, 0).random();
        assert!(a != b && a != c);
        assert_eq!(a, sample_rng(1, 0).random::<u64>());
    }

    #[test]
    fn ks_uniform() {
        let xs = parallel_draws(20_000, 3, |rng| Ok(rng.random::<f64>())).unwrap();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!(ks_accepts(d, xs.len(), 1e-3), "D = {d}");
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let d2 = ks_statistic(&ys, |x| x.clamp(0.0, 1.0));
        assert!(!ks_accepts(d2, ys.len(), 1e-3));
        let zs = parallel_draws(20_000, 4, |rng| Ok(rng.random::<f64>())).unwrap();
        assert!(ks_two_sample_accepts(ks_two_sample(&xs, &zs), xs.len(), zs.len(), 1e-3));
        assert!(!ks_two_sample_accepts(ks_two_sample(&xs, &ys), xs.len(), ys.len(), 1e-3));
    }

    #[test]
    fn too_few_samples() {
        assert!(parallel_moments(1, 0, 1, |_, _| Ok(())).is_err());
    }
}
