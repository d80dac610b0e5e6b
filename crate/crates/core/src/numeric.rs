//! Order-independent floating point summation and log-space helpers.
//!
//! Every score in the engine is a sum of weights or a sum of exponentials.
//! Summing through [`ExactSum`] yields the correctly rounded value of the
//! real sum, so the result depends only on the multiset of summands. Two
//! atoms supported by the same multiset of world scores therefore receive
//! bit-identical scores regardless of the order worlds were visited in.

/// Correctly rounded running sum of `f64` values (Shewchuk partials).
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
    special: f64,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        if !value.is_finite() {
            // inf / nan bypass the partials; inf + -inf gives nan as usual
            self.special += value;
            return;
        }
        let mut x = value;
        let mut kept = 0;
        for i in 0..self.partials.len() {
            let mut y = self.partials[i];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    /// The correctly rounded value of the sum (round-half-even).
    pub fn value(&self) -> f64 {
        if self.special != 0.0 || self.special.is_nan() {
            return self.special;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // half-way correction, as in CPython's math.fsum
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Correctly rounded sum of an iterator of values.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = ExactSum::new();
    acc.extend(values);
    acc.value()
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(Σ exp(x_i))`, computed relative to the maximum and summed exactly.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max.is_infinite() {
        return max;
    }
    max + exact_sum(values.iter().map(|v| (v - max).exp())).ln()
}

/// Accumulates `exp(x)` terms against a fixed log offset.
///
/// The offset must upper-bound every term that will be added (the engine
/// uses the best class score), so the scaled terms never overflow. Sums are
/// exact, which makes the result independent of insertion order.
#[derive(Debug, Clone)]
pub struct ScaledExpSum {
    offset: f64,
    sum: ExactSum,
    terms: u64,
}

impl ScaledExpSum {
    pub fn new(offset: f64) -> Self {
        Self {
            offset,
            sum: ExactSum::new(),
            terms: 0,
        }
    }

    pub fn add_log(&mut self, log_value: f64) {
        self.sum.add((log_value - self.offset).exp());
        self.terms += 1;
    }

    pub fn merge(&mut self, other: &ScaledExpSum) {
        debug_assert_eq!(self.offset.to_bits(), other.offset.to_bits());
        for p in &other.sum.partials {
            self.sum.add(*p);
        }
        self.sum.add(other.sum.special);
        self.terms += other.terms;
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// Scaled sum, `Σ exp(x_i − offset)`.
    pub fn scaled(&self) -> f64 {
        self.sum.value()
    }

    pub fn log_value(&self) -> f64 {
        let s = self.scaled();
        if s <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.offset + s.ln()
        }
    }

    pub fn value(&self) -> f64 {
        self.log_value().exp()
    }
}

/// `ln(2^n − s)` for `s ≤ 2^n`, valid for any `n` (no overflow for large n).
pub fn ln_remaining_worlds(n: usize, s: u128) -> f64 {
    if n < 128 {
        let total = 1u128 << n;
        debug_assert!(s <= total);
        let remaining = total.saturating_sub(s);
        if remaining == 0 {
            return f64::NEG_INFINITY;
        }
        return (remaining as f64).ln();
    }
    // s < 2^128 is negligible next to 2^n here
    let ratio = (s as f64) * (-(n as f64) * std::f64::consts::LN_2).exp();
    (n as f64) * std::f64::consts::LN_2 + (-ratio).ln_1p()
}
