//! Batched 2D complex FFTs on square grids.
//!
//! Rows are transformed in place, then columns through a transpose so every
//! 1D transform runs on contiguous memory. Neither direction normalizes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::exec;

/// Row batches smaller than this stay on one worker.
const ROWS_PER_TASK: usize = 16;

pub struct Fft2d {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

impl Fft2d {
    /// Returns the shared plan for `m x m` transforms.
    pub fn plan(m: usize) -> Arc<Fft2d> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft2d>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(m)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft2d {
                    m,
                    forward: planner.plan_fft_forward(m),
                    inverse: planner.plan_fft_inverse(m),
                })
            })
            .clone()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `out[j] = sum_k buf[k] exp(+2 pi i <j,k> / M)`, in place.
    pub fn inverse(&self, buf: &mut [Complex64], tmp: &mut Vec<Complex64>) {
        self.run(buf, tmp, Direction::Inverse);
    }

    /// `out[k] = sum_j buf[j] exp(-2 pi i <j,k> / M)`, in place.
    pub fn forward(&self, buf: &mut [Complex64], tmp: &mut Vec<Complex64>) {
        self.run(buf, tmp, Direction::Forward);
    }

    fn run(&self, buf: &mut [Complex64], tmp: &mut Vec<Complex64>, dir: Direction) {
        let m = self.m;
        assert_eq!(buf.len(), m * m, "buffer does not match plan size");
        tmp.resize(m * m, Complex64::default());
        self.rows(buf, dir);
        transpose(buf, tmp, m);
        self.rows(tmp, dir);
        transpose(tmp, buf, m);
    }

    fn rows(&self, data: &mut [Complex64], dir: Direction) {
        let fft = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let m = self.m;
        let chunk = m * ROWS_PER_TASK.min(m);
        exec::for_each_chunk_init(
            data,
            chunk,
            || vec![Complex64::default(); fft.get_inplace_scratch_len()],
            |scratch, rows| fft.process_with_scratch(rows, scratch),
        );
    }
}

/// Blocked out-of-place transpose of an `m x m` matrix.
fn transpose(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    const BLOCK: usize = 16;
    for ib in (0..m).step_by(BLOCK) {
        for jb in (0..m).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(m) {
                for j in jb..(jb + BLOCK).min(m) {
                    dst[j * m + i] = src[i * m + j];
                }
            }
        }
    }
}
