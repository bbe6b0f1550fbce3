//! Periodic-box geometry and the discrete frequency lattice.
//!
//! The box is [-lx, lx) x [-ly, ly) sampled on nx x ny points. Frequencies
//! live on lattices with spacings pi/lx and pi/ly covering the signed indices
//! -n/2 .. n/2-1, stored in FFT (wrap-around) order.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub dx: f64,
    pub dy: f64,
    /// xi[k] for FFT bin k along x (wrap-around ordering).
    pub xi: Vec<f64>,
    /// eta[m] for FFT bin m along y.
    pub eta: Vec<f64>,
}

/// Signed integer frequency of FFT bin `k` on an axis with `n` samples.
pub fn freq_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    /// Physical coordinate of sample i along x: -lx + i*dx.
    pub fn x(&self, i: usize) -> f64 {
        -self.lx + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.ly + j as f64 * self.dy
    }

    /// Quadrature weight of one physical cell.
    pub fn cell(&self) -> f64 {
        self.dx * self.dy
    }

    /// Spectral Plancherel weight: d(xi) d(eta) / (2 pi)^2 = 1/(4 lx ly).
    pub fn spectral_weight(&self) -> f64 {
        1.0 / (4.0 * self.lx * self.ly)
    }

    pub fn is_nyquist_x(&self, k: usize) -> bool {
        k == self.nx / 2
    }

    pub fn is_nyquist_y(&self, m: usize) -> bool {
        m == self.ny / 2
    }
}

pub fn build_grid(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<GridSpec>> {
    if nx % 2 != 0 || ny % 2 != 0 {
        return Err(Error::Grid(format!(
            "sample count must be even (got {nx} x {ny})"
        )));
    }
    if nx < 8 || ny < 8 {
        return Err(Error::Grid(format!(
            "sample count must be >= 8 (got {nx} x {ny})"
        )));
    }
    if !(lx > 0.0) || !(ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
        return Err(Error::Grid(format!(
            "box half-sizes must be positive finite (got {lx} x {ly})"
        )));
    }
    let dx = 2.0 * lx / nx as f64;
    let dy = 2.0 * ly / ny as f64;
    let xi = (0..nx)
        .map(|k| freq_index(k, nx) as f64 * PI / lx)
        .collect();
    let eta = (0..ny)
        .map(|m| freq_index(m, ny) as f64 * PI / ly)
        .collect();
    Ok(Arc::new(GridSpec {
        nx,
        ny,
        lx,
        ly,
        dx,
        dy,
        xi,
        eta,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_definition() {
        let g = build_grid(8, 8, PI, PI).unwrap();
        assert!((g.dx - 2.0 * PI / 8.0).abs() < 1e-15);
        // spacing 1, indices 0..3 then -4..-1 in wrap order
        assert!((g.xi[1] - 1.0).abs() < 1e-15);
        assert!((g.xi[4] - (-4.0)).abs() < 1e-15);
        assert!((g.xi[7] - (-1.0)).abs() < 1e-15);
        let mins = g.xi.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(mins, -4.0);
        assert!(g.xi.contains(&0.0));
    }

    #[test]
    fn spacing_anisotropic() {
        let g = build_grid(16, 8, 2.0 * PI, PI).unwrap();
        assert!((g.xi[1] - 0.5).abs() < 1e-15);
        assert!((g.eta[1] - 1.0).abs() < 1e-15);
        assert!((g.dx * g.nx as f64 - 2.0 * g.lx).abs() < 1e-15);
        assert!((g.dy * g.ny as f64 - 2.0 * g.ly).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(build_grid(7, 8, PI, PI).is_err());
        assert!(build_grid(8, 6, PI, PI).is_err());
        assert!(build_grid(8, 8, -1.0, PI).is_err());
    }
}
