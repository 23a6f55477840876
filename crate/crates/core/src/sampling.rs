//! Deterministic low-discrepancy sampling.
//!
//! All sequences run on u64 fixed-point accumulators, so a given (seed,
//! index) pair produces bit-identical points on every platform and under any
//! worker scheduling.

/// SplitMix64; used to derive per-stream state from a seed.
#[derive(Clone, Copy, Debug)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// 2-D R2 sequence (plastic-constant additive recurrence) in fixed point.
#[derive(Clone, Copy, Debug)]
pub struct R2 {
    s1: u64,
    s2: u64,
}

/// frac(1/phi2) and frac(1/phi2^2) for the plastic constant phi2, in 0.64
/// fixed point.
const R2_A1: u64 = 0xc13fa9a902a6328f;
const R2_A2: u64 = 0x91e10da5c79e7b1d;

impl R2 {
    pub fn new(seed: u64) -> Self {
        let mut sm = SplitMix64(seed);
        R2 {
            s1: sm.next_u64(),
            s2: sm.next_u64(),
        }
    }

    /// i-th point of the stream in [0,1)^2; pure in (seed, i).
    pub fn point(&self, i: u64) -> (f64, f64) {
        let a = self.s1.wrapping_add(R2_A1.wrapping_mul(i));
        let b = self.s2.wrapping_add(R2_A2.wrapping_mul(i));
        (
            (a >> 11) as f64 / (1u64 << 53) as f64,
            (b >> 11) as f64 / (1u64 << 53) as f64,
        )
    }
}

/// 1-D golden-ratio sequence in fixed point.
#[derive(Clone, Copy, Debug)]
pub struct Golden1 {
    s: u64,
}

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

impl Golden1 {
    pub fn new(seed: u64) -> Self {
        let mut sm = SplitMix64(seed);
        Golden1 { s: sm.next_u64() }
    }

    pub fn point(&self, i: u64) -> f64 {
        let a = self.s.wrapping_add(GOLDEN.wrapping_mul(i));
        (a >> 11) as f64 / (1u64 << 53) as f64
    }
}
