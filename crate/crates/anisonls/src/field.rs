//! Complex fields on the periodic box and the discrete Fourier transform pair.
//!
//! Transforms are normalized so that Parseval holds with the physical measure:
//! sum |u|^2 dx dy == sum |u_hat|^2 * (d xi d eta)/(2 pi)^2. The spectral
//! coefficients approximate the continuous Fourier transform of u restricted
//! to the box, so a plane wave e^{i(x+y)} has a single real positive
//! coefficient at (xi, eta) = (1, 1).

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{freq_index, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Physical,
    Spectral,
}

impl Space {
    fn name(self) -> &'static str {
        match self {
            Space::Physical => "physical",
            Space::Spectral => "spectral",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Arc<GridSpec>,
    /// Row-major over (x, y): index = ix * ny + iy.
    pub values: Vec<Complex64>,
    pub space: Space,
}

impl Field {
    pub fn zeros(grid: &Arc<GridSpec>, space: Space) -> Field {
        Field {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            space,
        }
    }

    /// Build a physical field from a function of the grid coordinates.
    pub fn from_fn(grid: &Arc<GridSpec>, mut f: impl FnMut(f64, f64) -> Complex64) -> Field {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.ny {
                values.push(f(x, grid.y(j)));
            }
        }
        Field {
            grid: grid.clone(),
            values,
            space: Space::Physical,
        }
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[ix * self.grid.ny + iy]
    }

    pub fn at_mut(&mut self, ix: usize, iy: usize) -> &mut Complex64 {
        &mut self.values[ix * self.grid.ny + iy]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&mut self, a: Complex64) {
        for v in &mut self.values {
            *v *= a;
        }
    }

    pub fn axpy(&mut self, a: Complex64, other: &Field) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (v, w) in self.values.iter_mut().zip(&other.values) {
            *v += a * w;
        }
    }

    pub fn norm_l2_grid(&self) -> f64 {
        let w = match self.space {
            Space::Physical => self.grid.cell(),
            Space::Spectral => self.grid.spectral_weight(),
        };
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    fn expect_space(&self, s: Space) -> Result<()> {
        if self.space != s {
            return Err(Error::SpaceTag {
                expected: s.name(),
                got: self.space.name(),
            });
        }
        Ok(())
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, forward))
            .or_insert_with(|| {
                let dir = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                FftPlanner::new().plan_fft(n, dir)
            })
            .clone()
    })
}

/// Unnormalized 2D FFT in place; `forward` selects e^{-i} vs e^{+i} kernels.
fn fft2(values: &mut [Complex64], nx: usize, ny: usize, forward: bool) {
    let fy = plan(ny, forward);
    for row in values.chunks_exact_mut(ny) {
        fy.process(row);
    }
    let fx = plan(nx, forward);
    let mut col = vec![Complex64::new(0.0, 0.0); nx];
    for j in 0..ny {
        for i in 0..nx {
            col[i] = values[i * ny + j];
        }
        fx.process(&mut col);
        for i in 0..nx {
            values[i * ny + j] = col[i];
        }
    }
}

/// Phase (-1)^(mx+my) aligning FFT bins with the box origin at the center.
fn checker_sign(k: usize, m: usize, nx: usize, ny: usize) -> f64 {
    let s = freq_index(k, nx) + freq_index(m, ny);
    if s.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn to_spectrum(u: &Field) -> Result<Field> {
    u.expect_space(Space::Physical)?;
    let g = &u.grid;
    let mut values = u.values.clone();
    fft2(&mut values, g.nx, g.ny, true);
    let cell = g.cell();
    for k in 0..g.nx {
        for m in 0..g.ny {
            values[k * g.ny + m] *= cell * checker_sign(k, m, g.nx, g.ny);
        }
    }
    Ok(Field {
        grid: g.clone(),
        values,
        space: Space::Spectral,
    })
}

pub fn from_spectrum(uh: &Field) -> Result<Field> {
    uh.expect_space(Space::Spectral)?;
    let g = &uh.grid;
    let mut values = uh.values.clone();
    let inv = 1.0 / (g.cell() * g.len() as f64);
    for k in 0..g.nx {
        for m in 0..g.ny {
            values[k * g.ny + m] *= inv * checker_sign(k, m, g.nx, g.ny);
        }
    }
    fft2(&mut values, g.nx, g.ny, false);
    Ok(Field {
        grid: g.clone(),
        values,
        space: Space::Physical,
    })
}

/// Ensure a physical-space copy of `u`.
pub fn to_physical(u: &Field) -> Result<Field> {
    match u.space {
        Space::Physical => Ok(u.clone()),
        Space::Spectral => from_spectrum(u),
    }
}

/// Ensure a spectral-space copy of `u`.
pub fn to_spectral(u: &Field) -> Result<Field> {
    match u.space {
        Space::Physical => to_spectrum(u),
        Space::Spectral => Ok(u.clone()),
    }
}

/// 2/3-rule truncation: the retained band is the frequency lattice of the
/// effective grid with 2n/3 points per axis, i.e. signed indices in
/// [-floor(n/3), floor(n/3)] with the upper boundary dropped when n is a
/// multiple of 3 (it plays the role of the reduced grid's Nyquist mode).
pub fn dealias(uh: &Field) -> Result<Field> {
    uh.expect_space(Space::Spectral)?;
    let g = &uh.grid;
    let keep = |idx: i64, n: usize| -> bool {
        let m = (n / 3) as i64;
        if 3 * (n / 3) == n {
            idx >= -m && idx < m
        } else {
            idx.abs() <= m
        }
    };
    let mut out = uh.clone();
    for k in 0..g.nx {
        let kx = freq_index(k, g.nx);
        for m in 0..g.ny {
            let my = freq_index(m, g.ny);
            if !(keep(kx, g.nx) && keep(my, g.ny)) {
                out.values[k * g.ny + m] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &Arc<GridSpec>, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = Field::zeros(grid, Space::Physical);
        for v in &mut f.values {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        f
    }

    #[test]
    fn round_trip() {
        let g = build_grid(16, 12, 2.0, 3.0).unwrap();
        let u = random_field(&g, 7);
        let back = from_spectrum(&to_spectrum(&u).unwrap()).unwrap();
        let err: f64 = u
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm: f64 = u.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(err / norm < 1e-12);
    }

    #[test]
    fn constant_field_is_dc() {
        let g = build_grid(8, 8, PI, PI).unwrap();
        let u = Field::from_fn(&g, |_, _| Complex64::new(1.0, 0.0));
        let uh = to_spectrum(&u).unwrap();
        for k in 0..8 {
            for m in 0..8 {
                let v = uh.at(k, m);
                if k == 0 && m == 0 {
                    assert!(v.norm() > 1.0);
                } else {
                    assert!(v.norm() < 1e-10, "leak at ({k},{m}): {v}");
                }
            }
        }
    }

    #[test]
    fn plane_wave_single_mode() {
        let g = build_grid(8, 8, PI, PI).unwrap();
        let u = Field::from_fn(&g, |x, y| (Complex64::i() * (x + y)).exp());
        let uh = to_spectrum(&u).unwrap();
        // mode (1,1) sits at FFT bins (1,1); coefficient = dx dy N = (2pi)^2
        for k in 0..8 {
            for m in 0..8 {
                let v = uh.at(k, m);
                if k == 1 && m == 1 {
                    assert!((v - Complex64::new(4.0 * PI * PI, 0.0)).norm() < 1e-9, "{v}");
                } else {
                    assert!(v.norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn parseval() {
        let g = build_grid(32, 16, 1.5, 2.5).unwrap();
        let u = random_field(&g, 3);
        let uh = to_spectrum(&u).unwrap();
        let a = u.norm_l2_grid();
        let b = uh.norm_l2_grid();
        assert!((a - b).abs() / a < 1e-12);
    }

    #[test]
    fn dealias_band_count() {
        let g = build_grid(12, 12, PI, PI).unwrap();
        let mut uh = Field::zeros(&g, Space::Spectral);
        for v in &mut uh.values {
            *v = Complex64::new(1.0, 0.0);
        }
        let t = dealias(&uh).unwrap();
        // surviving indices along one axis
        let mut survive_x = std::collections::HashSet::new();
        for k in 0..12 {
            for m in 0..12 {
                if t.at(k, m).norm() > 0.0 {
                    survive_x.insert(freq_index(k, 12));
                }
            }
        }
        assert_eq!(survive_x.len(), 8);
        assert!(survive_x.contains(&-4) && survive_x.contains(&3) && !survive_x.contains(&4));
        // idempotent
        let t2 = dealias(&t).unwrap();
        assert_eq!(t.values, t2.values);
    }
}
