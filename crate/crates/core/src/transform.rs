//! Unnormalized cyclic transforms `X_k = sum_j x_j exp(+2 pi i j k / n)` of
//! arbitrary length, and their multidimensional (axis-by-axis) extension.
//!
//! Lengths whose prime factors are all small go straight to rustfft's
//! mixed-radix planner. Everything else takes the chirp (Bluestein) path: a
//! length-`n` transform rewritten as a power-of-two circular convolution.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::arith;

/// Largest prime factor still routed to the mixed-radix planner.
const SMOOTH_LIMIT: u64 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformPath {
    MixedRadix,
    Chirp,
}

impl TransformPath {
    pub fn auto(n: usize) -> Self {
        let largest = arith::factorize(n as u64).last().map_or(1, |&(q, _)| q);
        if largest <= SMOOTH_LIMIT {
            TransformPath::MixedRadix
        } else {
            TransformPath::Chirp
        }
    }
}

enum Plan {
    Direct(Arc<dyn Fft<f64>>),
    Chirp {
        m: usize,
        chirp: Vec<Complex64>,
        kernel: Vec<Complex64>,
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
}

/// A planned transform of one fixed length.
pub struct CyclicTransform {
    n: usize,
    path: TransformPath,
    plan: Plan,
}

impl CyclicTransform {
    pub fn new(n: usize) -> Self {
        Self::with_path(n, TransformPath::auto(n))
    }

    pub fn with_path(n: usize, path: TransformPath) -> Self {
        assert!(n > 0, "transform length must be positive");
        let mut planner = FftPlanner::<f64>::new();
        let plan = match path {
            TransformPath::MixedRadix => Plan::Direct(planner.plan_fft_inverse(n)),
            TransformPath::Chirp => {
                let m = (2 * n - 1).next_power_of_two();
                let two_n = 2 * n as u128;
                // c_j = exp(i pi j^2 / n), j^2 reduced mod 2n to keep the phase exact
                let chirp: Vec<Complex64> = (0..n)
                    .map(|j| {
                        let r = (j as u128 * j as u128) % two_n;
                        Complex64::cis(std::f64::consts::PI * r as f64 / n as f64)
                    })
                    .collect();
                let mut kernel = vec![Complex64::new(0.0, 0.0); m];
                kernel[0] = chirp[0].conj();
                for j in 1..n {
                    kernel[j] = chirp[j].conj();
                    kernel[m - j] = chirp[j].conj();
                }
                let forward = planner.plan_fft_forward(m);
                let inverse = planner.plan_fft_inverse(m);
                forward.process(&mut kernel);
                Plan::Chirp {
                    m,
                    chirp,
                    kernel,
                    forward,
                    inverse,
                }
            }
        };
        Self { n, path, plan }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn path(&self) -> TransformPath {
        self.path
    }

    /// In-place transform of one line of length `n`.
    pub fn process(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        match &self.plan {
            Plan::Direct(fft) => fft.process(buf),
            Plan::Chirp {
                m,
                chirp,
                kernel,
                forward,
                inverse,
            } => {
                let mut work = vec![Complex64::new(0.0, 0.0); *m];
                for j in 0..self.n {
                    work[j] = buf[j] * chirp[j];
                }
                forward.process(&mut work);
                for (w, k) in work.iter_mut().zip(kernel) {
                    *w *= k;
                }
                inverse.process(&mut work);
                let scale = 1.0 / *m as f64;
                for k in 0..self.n {
                    buf[k] = work[k] * chirp[k] * scale;
                }
            }
        }
    }
}

/// Transforms a row-major array with shape `dims` along every axis.
pub fn transform_nd(data: &mut [Complex64], dims: &[usize]) {
    let total: usize = dims.iter().product();
    assert_eq!(data.len(), total);
    for (axis, &n) in dims.iter().enumerate() {
        if n <= 1 {
            continue;
        }
        let plan = CyclicTransform::new(n);
        let inner: usize = dims[axis + 1..].iter().product();
        let block = n * inner;
        let run_block = |chunk: &mut [Complex64]| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for offset in 0..inner {
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = chunk[offset + i * inner];
                }
                plan.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    chunk[offset + i * inner] = *v;
                }
            }
        };
        if total / block > 1 {
            data.par_chunks_mut(block).for_each(run_block);
        } else {
            // single block: parallelize over the strided lines instead
            let mut lines: Vec<Vec<Complex64>> = (0..inner)
                .into_par_iter()
                .map(|offset| {
                    let mut line: Vec<Complex64> = (0..n).map(|i| data[offset + i * inner]).collect();
                    plan.process(&mut line);
                    line
                })
                .collect();
            for (offset, line) in lines.iter_mut().enumerate() {
                for (i, v) in line.iter().enumerate() {
                    data[offset + i * inner] = *v;
                }
            }
        }
    }
}
