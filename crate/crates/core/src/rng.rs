//! Small integer-state random generator with fixed constants.
//!
//! All synthetic data in this crate is drawn from [`XorShift64Star`] so that
//! fixtures and simulation outputs are identical on every platform and can be
//! reproduced from another language with a few lines of code:
//!
//! ```text
//! seeding:  state = splitmix64(seed)   (0 is replaced by 0x9E3779B97F4A7C15)
//! step:     x ^= x >> 12; x ^= x << 25; x ^= x >> 27; state = x
//! output:   x * 0x2545F4914F6CDD1D  (wrapping)
//! uniform:  (output >> 11) * 2^-53            in [0, 1)
//! below(n): (output * n) >> 64  (128-bit product)
//! ```

const XORSHIFT_MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of the splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xorshift64* (Marsaglia shifts 12/25/27, Vigna multiplier).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let state = match splitmix64(seed) {
            0 => GOLDEN_GAMMA,
            s => s,
        };
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(XORSHIFT_MULTIPLIER)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` by multiply-shift. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard normal deviate (Box-Muller, one value per call).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Poisson deviate. Large means are split into chunks of at most 16 and
    /// each chunk drawn by Knuth's product-of-uniforms method, which keeps the
    /// draw exact without special functions.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        const CHUNK: f64 = 16.0;
        if !(mean > 0.0) {
            return 0;
        }
        let mut remaining = mean;
        let mut total = 0;
        while remaining > 0.0 {
            let part = remaining.min(CHUNK);
            remaining -= part;
            let limit = (-part).exp();
            let mut product = self.next_f64();
            while product > limit {
                total += 1;
                product *= self.next_f64();
            }
        }
        total
    }
}
