//! Scalar functionals of the model: mass, energy, the Pohozaev quantity Q,
//! momentum, the anisotropic scaling map u_t, the boosted energy E_omega and
//! the Weinstein quotient M_omega.
//!
//! Convention note. The forward transform uses the e^{-i x.xi} kernel (fixed
//! by the plane-wave behaviour of the spectral core). Under this convention
//! <u, i omega u_y> = -omega * int eta |u_hat|^2, so the boosted quadratic
//! form reads xi^2 + |eta|^{2s} - omega*eta + alpha and the cross term in
//! E_omega carries the matching minus sign. This is the unique sign choice
//! for which the minimizer of the Weinstein quotient satisfies the half-wave
//! Pohozaev identity int sgn(eta)|phi_hat|^2 = omega ||phi||^2 with ratio +1.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{dealias, from_spectrum, to_physical, to_spectral, Field, Space};
use crate::grid::{freq_index, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub s: f64,
    pub p: f64,
    pub alpha: f64,
    pub omega: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl ModelParams {
    pub fn new(s: f64, p: f64) -> ModelParams {
        ModelParams {
            s,
            p,
            alpha: 1.0,
            omega: 0.0,
            c: 1.0,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::Params(format!("s must lie in (0,1), got {}", self.s)));
        }
        if !(self.p > 2.0) {
            return Err(Error::Params(format!("p must exceed 2, got {}", self.p)));
        }
        Ok(())
    }

    /// Mass-critical exponent 2(3s+1)/(s+1).
    pub fn p_critical(&self) -> f64 {
        2.0 * (3.0 * self.s + 1.0) / (self.s + 1.0)
    }

    /// Existence ceiling 2(1+s)/(1-s).
    pub fn p_max(&self) -> f64 {
        2.0 * (1.0 + self.s) / (1.0 - self.s)
    }

    pub fn regime(&self) -> Regime {
        let pc = self.p_critical();
        if (self.p - pc).abs() <= 1e-12 * pc {
            Regime::Critical
        } else if self.p < pc {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Diagnostics {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub q: f64,
    pub momentum: f64,
    pub hdot: f64,
    pub lp: f64,
    pub virial: Option<f64>,
}

/// Quadratic spectral moments of a field, computed from one transform.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectralMoments {
    pub mass: f64,
    /// int xi^2 |u_hat|^2
    pub kx2: f64,
    /// int |eta|^{2s} |u_hat|^2
    pub ky2s: f64,
    /// int sgn(eta)|eta| |u_hat|^2  (= int eta |u_hat|^2, Nyquist dropped)
    pub eta1: f64,
    /// int xi |u_hat|^2 (Nyquist dropped)
    pub xi1: f64,
}

pub fn spectral_moments(u: &Field, s: f64) -> Result<SpectralMoments> {
    if !u.is_finite() {
        return Err(Error::NonFinite("spectral_moments"));
    }
    let uh = to_spectral(u)?;
    let g = &uh.grid;
    let w = g.spectral_weight();
    let mut m = SpectralMoments::default();
    for k in 0..g.nx {
        let xi = g.xi[k];
        let nqx = g.is_nyquist_x(k);
        for j in 0..g.ny {
            let eta = g.eta[j];
            let a = uh.values[k * g.ny + j].norm_sqr() * w;
            m.mass += a;
            m.kx2 += xi * xi * a;
            m.ky2s += eta.abs().powf(2.0 * s) * a;
            if !g.is_nyquist_y(j) {
                m.eta1 += eta * a;
            }
            if !nqx {
                m.xi1 += xi * a;
            }
        }
    }
    Ok(m)
}

pub fn mass(u: &Field) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::NonFinite("mass"));
    }
    let w = match u.space {
        Space::Physical => u.grid.cell(),
        Space::Spectral => u.grid.spectral_weight(),
    };
    Ok(u.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w)
}

/// ||u_x||^2 + ||D_y^s u||^2, evaluated spectrally.
pub fn hdot(u: &Field, s: f64) -> Result<f64> {
    let m = spectral_moments(u, s)?;
    Ok(m.kx2 + m.ky2s)
}

/// |z|^{p-2} z with a hard floor to avoid 0^{negative} for p < 2 exponents.
pub fn power_nonlinearity(z: Complex64, p: f64) -> Complex64 {
    let r = z.norm();
    if r < 1e-300 {
        Complex64::new(0.0, 0.0)
    } else {
        z * r.powf(p - 2.0)
    }
}

/// int |u|^p over the box, with u dealiased first (2/3 rule).
pub fn lp_power(u: &Field, p: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::NonFinite("lp_power"));
    }
    let uh = to_spectral(u)?;
    let ud = from_spectrum(&dealias(&uh)?)?;
    let cell = ud.grid.cell();
    Ok(ud.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * cell)
}

/// L^p norm of u (dealiased).
pub fn lp_norm(u: &Field, p: f64) -> Result<f64> {
    Ok(lp_power(u, p)?.powf(1.0 / p))
}

pub fn energy(u: &Field, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    Ok(hdot(u, params.s)? / 2.0 - lp_power(u, params.p)? / params.p)
}

/// Pohozaev quantity Q(u) = s*hdot - (s+1)(p-2)/(2p) * ||u||_p^p.
pub fn q_pohozaev(u: &Field, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let s = params.s;
    let p = params.p;
    Ok(s * hdot(u, s)? - (s + 1.0) * (p - 2.0) / (2.0 * p) * lp_power(u, p)?)
}

/// Momentum P(u) = int sgn(eta)|eta||u_hat|^2 - int xi |u_hat|^2.
pub fn momentum(u: &Field) -> Result<f64> {
    let m = spectral_moments(u, 0.5)?;
    Ok(m.eta1 - m.xi1)
}

/// Boosted energy E_omega(u) = E(u) - (omega/2) int eta |u_hat|^2 (see the
/// module-level convention note).
pub fn energy_omega(u: &Field, params: &ModelParams) -> Result<f64> {
    let m = spectral_moments(u, params.s)?;
    let e = (m.kx2 + m.ky2s) / 2.0 - lp_power(u, params.p)? / params.p;
    Ok(e - params.omega / 2.0 * m.eta1)
}

/// Weinstein quotient M_omega(u) =
/// (hdot - omega int eta|u_hat|^2 + alpha mass)^{p/2} / ||u||_p^p.
pub fn weinstein_quotient(u: &Field, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let denom = lp_power(u, params.p)?;
    if denom <= 0.0 {
        return Err(Error::ZeroField("weinstein_quotient"));
    }
    let m = spectral_moments(u, params.s)?;
    let num = m.kx2 + m.ky2s - params.omega * m.eta1 + params.alpha * m.mass;
    Ok(num.powf(params.p / 2.0) / denom)
}

/// Minimum over the frequency lattice of xi^2 + |eta|^{2s} - omega*eta + alpha.
pub fn quadratic_form_omega(grid: &GridSpec, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let mut min = f64::INFINITY;
    for &xi in &grid.xi {
        for &eta in &grid.eta {
            let v = xi * xi + eta.abs().powf(2.0 * params.s) - params.omega * eta + params.alpha;
            if v < min {
                min = v;
            }
        }
    }
    Ok(min)
}

/// Anisotropic scaling u_t(x,y) = t^{(s+1)/2} u(t^s x, t y), evaluated by
/// resampling the trigonometric interpolant of u at the scaled coordinates.
pub fn scale_field(u: &Field, t: f64, s: f64) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::Params(format!("scaling parameter must be positive, got {t}")));
    }
    if t == 1.0 {
        return to_physical(u);
    }
    let m0 = mass(u)?;
    let up = to_physical(u)?;
    let g = &up.grid;
    // resample along x at t^s * x, then along y at t * y
    let vx = resample_axis_x(&up, t.powf(s));
    let mut vy = resample_axis_y(&vx, t);
    let amp = t.powf((s + 1.0) / 2.0);
    vy.scale(Complex64::new(amp, 0.0));
    let m1 = mass(&vy)?;
    let drift = (m1 - m0).abs() / m0.max(1e-300);
    if drift > 1e-3 {
        return Err(Error::ResolutionLoss { mass_change: drift });
    }
    debug_assert_eq!(vy.grid.len(), g.len());
    Ok(vy)
}

/// Resample the periodic trigonometric interpolant along x at a*x.
pub fn resample_axis_x(u: &Field, a: f64) -> Field {
    let g = &u.grid;
    let (nx, ny) = (g.nx, g.ny);
    // 1D DFT coefficients along x for every y column
    let mut coeff = u.values.clone();
    dft_axis_x(&mut coeff, nx, ny, true);
    // evaluation matrix M[i][k] = e^{i xi_k (a x_i + lx)} / nx
    let mut out = vec![Complex64::new(0.0, 0.0); nx * ny];
    let mut row = vec![Complex64::new(0.0, 0.0); nx];
    for i in 0..nx {
        let x = a * g.x(i);
        // coordinates outside the box read the decaying extension, not the
        // periodic wrap-around: treat them as zero
        if x < -g.lx || x >= g.lx {
            continue;
        }
        for (k, r) in row.iter_mut().enumerate() {
            let xi = g.xi[k];
            *r = Complex64::new(0.0, xi * (x + g.lx)).exp() / nx as f64;
        }
        for k in 0..nx {
            let m = row[k];
            let src = &coeff[k * ny..(k + 1) * ny];
            let dst = &mut out[i * ny..(i + 1) * ny];
            for j in 0..ny {
                dst[j] += m * src[j];
            }
        }
    }
    Field {
        grid: g.clone(),
        values: out,
        space: Space::Physical,
    }
}

pub fn resample_axis_y(u: &Field, a: f64) -> Field {
    let g = &u.grid;
    let (nx, ny) = (g.nx, g.ny);
    let mut coeff = u.values.clone();
    dft_axis_y(&mut coeff, nx, ny, true);
    let mut out = vec![Complex64::new(0.0, 0.0); nx * ny];
    let mut row = vec![Complex64::new(0.0, 0.0); ny];
    for j in 0..ny {
        let y = a * g.y(j);
        if y < -g.ly || y >= g.ly {
            continue;
        }
        for (m, r) in row.iter_mut().enumerate() {
            let eta = g.eta[m];
            *r = Complex64::new(0.0, eta * (y + g.ly)).exp() / ny as f64;
        }
        for i in 0..nx {
            let src = &coeff[i * ny..(i + 1) * ny];
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..ny {
                acc += row[m] * src[m];
            }
            out[i * ny + j] = acc;
        }
    }
    Field {
        grid: g.clone(),
        values: out,
        space: Space::Physical,
    }
}

fn dft_axis_x(values: &mut [Complex64], nx: usize, ny: usize, forward: bool) {
    use rustfft::{FftDirection, FftPlanner};
    let dir = if forward {
        FftDirection::Forward
    } else {
        FftDirection::Inverse
    };
    let plan = FftPlanner::new().plan_fft(nx, dir);
    let mut col = vec![Complex64::new(0.0, 0.0); nx];
    for j in 0..ny {
        for i in 0..nx {
            col[i] = values[i * ny + j];
        }
        plan.process(&mut col);
        for i in 0..nx {
            values[i * ny + j] = col[i];
        }
    }
}

fn dft_axis_y(values: &mut [Complex64], _nx: usize, ny: usize, forward: bool) {
    use rustfft::{FftDirection, FftPlanner};
    let dir = if forward {
        FftDirection::Forward
    } else {
        FftDirection::Inverse
    };
    let plan = FftPlanner::new().plan_fft(ny, dir);
    for row in values.chunks_exact_mut(ny) {
        plan.process(row);
    }
}

/// Full diagnostics record at time t.
pub fn diagnostics(u: &Field, params: &ModelParams, t: f64, virial: Option<f64>) -> Result<Diagnostics> {
    let m = spectral_moments(u, params.s)?;
    let lpp = lp_power(u, params.p)?;
    let hd = m.kx2 + m.ky2s;
    Ok(Diagnostics {
        t,
        mass: m.mass,
        energy: hd / 2.0 - lpp / params.p,
        q: params.s * hd - (params.s + 1.0) * (params.p - 2.0) / (2.0 * params.p) * lpp,
        momentum: m.eta1 - m.xi1,
        hdot: hd,
        lp: lpp.powf(1.0 / params.p),
        virial,
    })
}

/// The two frequency indices of a spectral bin (helper for tests/tools).
pub fn bin_indices(g: &GridSpec, flat: usize) -> (i64, i64) {
    let k = flat / g.ny;
    let m = flat % g.ny;
    (freq_index(k, g.nx), freq_index(m, g.ny))
}
