//! Discrete Fourier helpers: spectral derivatives and Sobolev norms.
//!
//! Conventions (frozen; every Sobolev threshold in the crate depends on
//! them):
//!
//! * transform: `u_hat(xi_m) = h^n * sum_j u_j exp(-i xi_m . x_j)` with
//!   `xi_m = pi m / L`, `m = -N/2 .. N/2-1` per axis;
//! * Parseval holds exactly on the grid:
//!   `h^n sum |u_j|^2 = (2L)^{-n} sum |u_hat|^2`;
//! * `||u||_{H^k}^2 = (2L)^{-n} sum (1 + |xi|^2)^k |u_hat|^2`.
//!
//! With these choices `||sin||_{H^1}^2 = 2*pi` on `[-pi, pi)`.

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::C64;

/// Signed frequencies `xi_m = pi*m/L` in FFT output order.
pub fn frequencies(points: usize, extent: f64) -> Vec<f64> {
    let n = points as i64;
    (0..n)
        .map(|m| {
            let signed = if m < n - n / 2 { m } else { m - n };
            std::f64::consts::PI * signed as f64 / extent
        })
        .collect()
}

fn fft_in_place(data: &mut [C64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    fft.process(data);
    if inverse {
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Unnormalized forward FFT (1D), or per-axis FFT for a 2D field.
pub fn fft(u: &[C64], grid: &Grid) -> Vec<C64> {
    let mut data = u.to_vec();
    match grid.dim {
        1 => fft_in_place(&mut data, false),
        2 => fft2_in_place(&mut data, grid.points, false),
        _ => unreachable!("grid dimension validated elsewhere"),
    }
    data
}

/// Inverse of [`fft`], normalized so `ifft(fft(u)) == u`.
pub fn ifft(u: &[C64], grid: &Grid) -> Vec<C64> {
    let mut data = u.to_vec();
    match grid.dim {
        1 => fft_in_place(&mut data, true),
        2 => fft2_in_place(&mut data, grid.points, true),
        _ => unreachable!(),
    }
    data
}

fn fft2_in_place(data: &mut [C64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    // rows
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    // columns via transpose
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
    if inverse {
        let scale = 1.0 / (n * n) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Spectral derivative of the given order along `axis` (0 = first axis).
pub fn spectral_derivative(u: &[C64], grid: &Grid, axis: usize, order: u32) -> Vec<C64> {
    let mut hat = fft(u, grid);
    let xi = frequencies(grid.points, grid.extent);
    match grid.dim {
        1 => {
            for (m, v) in hat.iter_mut().enumerate() {
                *v *= C64::new(0.0, xi[m]).powu(order);
            }
        }
        2 => {
            let n = grid.points;
            for i in 0..n {
                for j in 0..n {
                    let f = if axis == 0 { xi[i] } else { xi[j] };
                    hat[i * n + j] *= C64::new(0.0, f).powu(order);
                }
            }
        }
        _ => unreachable!(),
    }
    ifft(&hat, grid)
}

/// `||u||_{H^k}` for `k = 0..=k_max` computed from a single transform.
///
/// Returns the norms together with the fraction of the top-order sum carried
/// by the highest resolved octave (`|m| > N/4`); a fraction above 0.5 means
/// the top norm is aliasing-dominated and should not be trusted.
pub fn sobolev_norms(u: &[C64], grid: &Grid, k_max: usize) -> Result<(Vec<f64>, f64)> {
    if u.len() != grid.len() {
        return Err(Error::Config(format!(
            "field length {} does not match grid {}",
            u.len(),
            grid.len()
        )));
    }
    let hat = fft(u, grid);
    let xi = frequencies(grid.points, grid.extent);
    let hn = grid.cell();
    let vol = (2.0 * grid.extent).powi(grid.dim as i32);
    let scale = hn * hn / vol;
    let n = grid.points;
    let cutoff = (n / 4) as f64 * std::f64::consts::PI / grid.extent;

    let mut sums = vec![0.0; k_max + 1];
    let mut top_tail = 0.0;
    for (idx, v) in hat.iter().enumerate() {
        let xi2 = match grid.dim {
            1 => xi[idx] * xi[idx],
            2 => {
                let (i, j) = (idx / n, idx % n);
                xi[i] * xi[i] + xi[j] * xi[j]
            }
            _ => unreachable!(),
        };
        let p = v.norm_sqr() * scale;
        let mut mult = 1.0;
        for s in sums.iter_mut() {
            *s += mult * p;
            mult *= 1.0 + xi2;
        }
        if xi2.sqrt() > cutoff {
            top_tail += (1.0 + xi2).powi(k_max as i32) * p;
        }
    }
    let norms = sums.iter().map(|s| s.sqrt()).collect();
    let frac = if sums[k_max] > 0.0 {
        top_tail / sums[k_max]
    } else {
        0.0
    };
    Ok((norms, frac))
}

/// `||u||_{H^k}` alone.
pub fn sobolev_norm(u: &[C64], grid: &Grid, k: usize) -> Result<f64> {
    Ok(sobolev_norms(u, grid, k)?.0[k])
}
