//! Deterministic random sources for the simulation layer.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood): a 64-bit counter
//! advanced by the golden-ratio increment with a two-round xor-multiply
//! finalizer. It is seedable, tiny and fully specified here, so every
//! sampled artifact is reproducible bit-for-bit from its seed.

use alloc::vec::Vec;

use num_traits::Float;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller (consumes two uniforms).
    pub fn next_normal(&mut self) -> f64 {
        // Guard against ln(0).
        let u1 = loop {
            let u = self.next_f64();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
    }
}

/// Decorrelated sub-seed for the record at `(alpha, m)`.
///
/// Records draw from independent streams keyed by basis and vector index,
/// so sampling is independent of plan order and safe to parallelize.
pub fn record_sub_seed(seed: u64, alpha: u8, m: u8) -> u64 {
    mix64(seed ^ ((alpha as u64) << 40) ^ ((m as u64) << 32) ^ GOLDEN)
}

/// Binomial draws with `shots` trials and success probability `p`.
///
/// Exact CDF inversion for `shots <= 10_000`: the pmf table is built by
/// the log-space recurrence from k = 0 and inverted against a single
/// uniform (normalized by the table total, so underflowed tail mass does
/// not bias the draw). Above that, the normal approximation with
/// continuity correction is used.
pub fn sample_binomial(rng: &mut SplitMix64, shots: u64, p: f64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return shots;
    }
    if shots == 0 {
        return 0;
    }
    if shots <= 10_000 {
        binomial_inversion(rng, shots, p)
    } else {
        binomial_normal_approx(rng, shots, p)
    }
}

fn binomial_inversion(rng: &mut SplitMix64, n: u64, p: f64) -> u64 {
    let nf = n as f64;
    let log_ratio = p.ln() - (1.0 - p).ln();
    // log pmf(k+1) = log pmf(k) + ln((n-k)/(k+1)) + ln(p/(1-p))
    let mut log_pmf = nf * (1.0 - p).ln();
    let mut total = 0.0f64;
    let mut cdf = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        total += log_pmf.exp();
        cdf.push(total);
        if k < n {
            let kf = k as f64;
            log_pmf += ((nf - kf) / (kf + 1.0)).ln() + log_ratio;
        }
    }
    let target = rng.next_f64() * total;
    // First index with cdf[k] >= target.
    match cdf.binary_search_by(|c| c.partial_cmp(&target).expect("finite cdf")) {
        Ok(k) | Err(k) => (k as u64).min(n),
    }
}

fn binomial_normal_approx(rng: &mut SplitMix64, n: u64, p: f64) -> u64 {
    let nf = n as f64;
    let mean = nf * p;
    let sd = (nf * p * (1.0 - p)).sqrt();
    let z = rng.next_normal();
    let k = (mean + sd * z + 0.5).floor();
    if k < 0.0 {
        0
    } else if k > nf {
        n
    } else {
        k as u64
    }
}
