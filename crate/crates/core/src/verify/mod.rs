//! Numerical verification harness: sublevel-set exponents, comparability
//! spot checks, damping integrability scans, and oscillatory decay fits.
//!
//! Determinism contract: every estimate is a pure function of (input, seed,
//! configuration). Work is split into fixed-size units indexed independently
//! of the worker count, and partial results are reduced in unit order, so
//! runs are bit-identical across 1..N workers.

pub mod compare;
pub mod damping;
pub mod decay;
pub mod fit;
pub mod sublevel;

pub use compare::{check_all_bounds, check_comparability, check_damping_domination, ComparabilityReport};
pub use damping::{damping_integrability_scan, IntegrabilityReport, Trend};
pub use decay::{estimate_decay, DampedMeasureSpec, DecayTarget};
pub use fit::{FitResult, Verdict};
pub use sublevel::estimate_sublevel_exponent;

/// Geometric grid (min, max, count >= 4).
#[derive(Clone, Copy, Debug)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> crate::Result<Grid> {
        if !(min > 0.0 && max > min && count >= 4) {
            return Err(crate::Error::Invalid(
                "grid needs 0 < min < max and count >= 4".into(),
            ));
        }
        Ok(Grid { min, max, count })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                self.min * (self.max / self.min).powf(t)
            })
            .collect()
    }
}

/// Shared configuration for the harness operations.
#[derive(Clone, Debug)]
pub struct VerificationConfig {
    pub seed: u64,
    pub samples: usize,
    pub radius: f64,
    pub t_grid: Grid,
    pub s_grid: Grid,
    pub lambda_grid: Grid,
    pub precision_bits: u32,
    pub workers: usize,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        VerificationConfig {
            seed: 1,
            samples: 1_000_000,
            radius: 0.75,
            t_grid: Grid {
                min: 1e-4,
                max: 1e-2,
                count: 7,
            },
            s_grid: Grid {
                min: 0.5,
                max: 2.0,
                count: 4,
            },
            lambda_grid: Grid {
                min: 16.0,
                max: 4096.0,
                count: 9,
            },
            precision_bits: 64,
            workers: 1,
        }
    }
}

impl VerificationConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.samples < 1_000 {
            return Err(crate::Error::Invalid("samples must be >= 1000".into()));
        }
        if !self.radius.is_finite() || self.radius <= 0.0 {
            return Err(crate::Error::Invalid("radius must be positive".into()));
        }
        for g in [&self.t_grid, &self.s_grid, &self.lambda_grid] {
            if g.count < 4 || !(g.min > 0.0 && g.max > g.min) {
                return Err(crate::Error::Invalid("bad grid".into()));
            }
        }
        Ok(())
    }
}

/// Run `units` independent work items across `workers` threads and reduce
/// the results in unit order. The unit function must be pure in its index.
pub fn run_units<R, F>(units: usize, workers: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let workers = workers.max(1).min(units.max(1));
    if workers <= 1 || units <= 1 {
        return (0..units).map(f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..units).map(|_| None).collect();
    let slots_ref = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= units {
                    break;
                }
                let r = f(i);
                let mut guard = slots_ref.lock().unwrap();
                guard[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|s| s.expect("unit completed")).collect()
}
