//! Compensated (Neumaier) accumulation for long complex sums.

use num_complex::Complex64;

/// Above this many terms, sums switch to compensated accumulation.
pub const COMPENSATE_ABOVE: usize = 100_000;

#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Sums an iterator of complex terms; compensated when `len_hint` is large.
pub fn sum_complex<I: IntoIterator<Item = Complex64>>(terms: I, len_hint: usize) -> Complex64 {
    if len_hint > COMPENSATE_ABOVE {
        let mut acc = ComplexSum::default();
        for z in terms {
            acc.add(z);
        }
        acc.value()
    } else {
        terms.into_iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_low_bits() {
        let mut n = Neumaier::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            n.add(x);
        }
        assert_eq!(n.value(), 2.0);
    }
}
