//! Resolvent kernels of the stationary operator: the heat-type profile
//! H_s(y,t), the kernel K_s = (1 + xi^2 + |eta|^{2s})^{-1} in physical space,
//! its decay certificates, the boosted kernel G with drift -omega*eta, and
//! the convolution form of the stationary equation.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{to_physical, to_spectral, Field};
use crate::functionals::ModelParams;
use crate::quad::{adaptive, oscillatory_integral, QuadResult};
use crate::traveling::omega_floor;

/// Prefactor of the t-representation: K_s = C_s int e^{-t} e^{-x^2/4t}
/// t^{-1/2} H_s(y,t) dt with C_s = sqrt(pi)/(2 pi)^2, fixed analytically by
/// ||K_s||_{L^1} = K_s_hat(0) = 1.
const C_S: f64 = 0.04489678053129164; // sqrt(pi) / (4 pi^2)

/// Envelope threshold: integrands are truncated where the exponent
/// exceeds this value.
const EXP_CUT: f64 = 42.0;

#[derive(Debug, Clone, Copy)]
pub struct KernelSample {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub abs_err_estimate: f64,
}

fn validate_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Params(format!("s must lie in (0,1), got {s}")));
    }
    Ok(())
}

/// H_s at unit time: 2 int_0^inf e^{-eta^{2s}} cos(z eta) d eta.
fn h_unit(z: f64, s: f64, rel_tol: f64) -> Result<QuadResult> {
    let z = z.abs();
    let cutoff = EXP_CUT.powf(1.0 / (2.0 * s));
    let f = move |eta: f64| (-eta.powf(2.0 * s)).exp() * (z * eta).cos();
    let r = if z == 0.0 {
        adaptive(&f, 0.0, cutoff, rel_tol, 1e-300)?
    } else {
        oscillatory_integral(&f, PI / (2.0 * z), PI / z, cutoff, rel_tol)?
    };
    Ok(QuadResult {
        value: 2.0 * r.value,
        abs_err: 2.0 * r.abs_err,
        evals: r.evals,
    })
}

/// The profile H_s(y,t) = int e^{-t|eta|^{2s}} e^{i y eta} d eta, evaluated
/// through the self-similar reduction H_s(y,t) = t^{-1/(2s)} H_s(t^{-1/(2s)} y, 1).
pub fn hs_profile(y: f64, t: f64, s: f64) -> Result<f64> {
    validate_s(s)?;
    if !(t > 0.0) {
        return Err(Error::Params(format!("hs_profile needs t > 0, got {t}")));
    }
    let lam = t.powf(-1.0 / (2.0 * s));
    Ok(lam * h_unit(lam * y, s, 1e-10)?.value)
}

/// t-integral of the kernel representation on the log axis u = log t:
/// C_s int e^{-alpha t - x^2/4t} t^{1/2} H_s(y, t) du.
fn ks_raw(x: f64, y: f64, s: f64, alpha: f64, rel_tol: f64) -> Result<QuadResult> {
    validate_s(s)?;
    if x == 0.0 && y == 0.0 {
        return Err(Error::Quadrature("kernel is singular at the origin".into()));
    }
    let u_hi = (45.0 / alpha).ln();
    let u_lo = if y != 0.0 {
        // small-t tail ~ t^{3/2}/|y|^{1+2s}
        (1e-13 * y.abs().powf(1.0 + 2.0 * s)).powf(2.0 / 3.0).ln().min(0.0) - 2.0
    } else {
        (x * x / 240.0).ln().min(0.0) - 2.0
    };
    let f = |u: f64| {
        let t: f64 = u.exp();
        let gauss = if x == 0.0 { 1.0 } else { (-x * x / (4.0 * t)).exp() };
        let h = hs_profile(y, t, s).unwrap_or(f64::NAN);
        (-alpha * t).exp() * gauss * t.sqrt() * h
    };
    let r = adaptive(&f, u_lo, u_hi, rel_tol, 1e-300)?;
    if !r.value.is_finite() {
        return Err(Error::Quadrature("non-finite kernel integrand".into()));
    }
    Ok(QuadResult {
        value: C_S * r.value,
        abs_err: C_S * r.abs_err + 1e-9 * C_S * r.value.abs(),
        evals: r.evals,
    })
}

fn accept_sample(x: f64, y: f64, r: QuadResult) -> Result<KernelSample> {
    if r.abs_err >= 1e-8 * r.value.abs().max(1e-12) {
        return Err(Error::Quadrature(format!(
            "kernel sample error {:.3e} too large for value {:.6e}",
            r.abs_err, r.value
        )));
    }
    Ok(KernelSample {
        x,
        y,
        value: r.value,
        abs_err_estimate: r.abs_err,
    })
}

/// The kernel K_s(x,y) with a certified quadrature error estimate.
pub fn ks_kernel(x: f64, y: f64, s: f64) -> Result<KernelSample> {
    accept_sample(x, y, ks_raw(x, y, s, 1.0, 1e-9)?)
}

#[cfg(test)]
pub(crate) fn ks_kernel_with_tol(x: f64, y: f64, s: f64, rel_tol: f64) -> Result<QuadResult> {
    ks_raw(x, y, s, 1.0, rel_tol)
}

/// Integral of K_s over the box [-bx, bx] x [-by, by], evaluated
/// semi-analytically: the x-integral collapses to erf(bx/(2 sqrt t)) and the
/// y-integral to a damped Dirichlet integral.
pub fn ks_box_integral(s: f64, bx: f64, by: f64) -> Result<f64> {
    validate_s(s)?;
    if !(bx > 0.0 && by > 0.0) {
        return Err(Error::Params("box half-widths must be positive".into()));
    }
    let dirichlet = |t: f64| -> Result<f64> {
        let f = move |eta: f64| {
            if eta == 0.0 {
                by
            } else {
                (-t * eta.powf(2.0 * s)).exp() * (by * eta).sin() / eta
            }
        };
        let cutoff = (EXP_CUT / t).powf(1.0 / (2.0 * s)).max(10.0 * PI / by);
        let r = oscillatory_integral(&f, PI / by, PI / by, cutoff, 1e-8)?;
        Ok(2.0 / PI * r.value)
    };
    let f = |u: f64| {
        let t: f64 = u.exp();
        let d = dirichlet(t).unwrap_or(f64::NAN);
        t * (-t).exp() * libm::erf(bx / (2.0 * t.sqrt())) * d
    };
    let r = adaptive(&f, (1e-9f64).ln(), 45.0f64.ln(), 1e-7, 1e-9)?;
    if !r.value.is_finite() {
        return Err(Error::Quadrature("non-finite box integrand".into()));
    }
    Ok(r.value)
}

/// Smallest omega_1 in (0, alpha) with
/// |eta|^{2s} - omega*eta + omega_1 >= |eta|^{2s}/2 on a dense eta lattice;
/// alpha_0 = alpha - omega_1 then drives the e^{-sqrt(alpha_0)|x|} decay rate.
pub fn omega_one(s: f64, omega: f64, alpha: f64) -> Result<f64> {
    validate_s(s)?;
    if !(alpha > 0.0) {
        return Err(Error::Params(format!("alpha must be positive, got {alpha}")));
    }
    let n = 4001;
    let etas: Vec<f64> = (0..n).map(|i| -100.0 + 200.0 * i as f64 / (n - 1) as f64).collect();
    for j in 1..200 {
        let w1 = alpha * j as f64 / 200.0;
        let ok = etas
            .iter()
            .all(|&eta| 0.5 * eta.abs().powf(2.0 * s) - omega * eta + w1 >= 0.0);
        if ok {
            return Ok(w1);
        }
    }
    Err(Error::Params(format!(
        "no omega_1 in (0, {alpha}) tames the drift for s={s}, omega={omega}"
    )))
}

fn check_boosted_domain(s: f64, omega: f64, alpha: f64) -> Result<()> {
    validate_s(s)?;
    if s < 0.5 && omega != 0.0 {
        return Err(Error::Params(format!(
            "symbol |eta|^{{2s}} - omega*eta is unbounded below for s={s} < 1/2"
        )));
    }
    if (s - 0.5).abs() < 1e-14 && omega.abs() >= 1.0 {
        return Err(Error::Params(format!(
            "s = 1/2 requires |omega| < 1, got {omega}"
        )));
    }
    if s > 0.5 {
        let w0 = omega_floor(s, omega)?;
        if alpha <= w0 {
            return Err(Error::Params(format!(
                "alpha = {alpha} must exceed the drift floor omega_0 = {w0}"
            )));
        }
    }
    Ok(())
}

/// Drift profile int e^{-t(|eta|^{2s} - omega*eta)} e^{i y eta} d eta for
/// s > 1/2, as two decaying half-line integrals.
fn h_drift(y: f64, t: f64, s: f64, omega: f64) -> Result<Complex64> {
    let cutoff = |w: f64| -> f64 {
        let mut eta = if 2.0 * s - 1.0 > 1e-9 && w > 0.0 {
            (2.0 * w).powf(1.0 / (2.0 * s - 1.0)).max(1.0)
        } else {
            1.0
        };
        while t * (eta.powf(2.0 * s) - w * eta) < EXP_CUT {
            eta *= 2.0;
        }
        eta
    };
    let mut total = Complex64::new(0.0, 0.0);
    for sign in [1.0f64, -1.0] {
        let w = sign * omega;
        let env = move |eta: f64| (-t * (eta.powf(2.0 * s) - w * eta)).exp();
        let l = cutoff(w);
        let (c, si) = if y == 0.0 {
            (adaptive(&|e: f64| env(e), 0.0, l, 1e-9, 1e-300)?.value, 0.0)
        } else {
            let ya = y.abs();
            let fc = move |e: f64| env(e) * (ya * e).cos();
            let fs = move |e: f64| env(e) * (ya * e).sin();
            (
                oscillatory_integral(&fc, PI / (2.0 * ya), PI / ya, l, 1e-9)?.value,
                oscillatory_integral(&fs, PI / ya, PI / ya, l, 1e-9)?.value,
            )
        };
        // e^{+-i y eta} on the eta >= 0 (sign=+1) and eta <= 0 branches
        let im = sign * y.signum() * si;
        total += Complex64::new(c, im);
    }
    Ok(total)
}

/// The boosted kernel G = (alpha + xi^2 + |eta|^{2s} - omega*eta)^{-1} in
/// physical space. G is complex for omega != 0; the sample reports |G|.
pub fn g_kernel(x: f64, y: f64, params: &ModelParams) -> Result<KernelSample> {
    let (s, omega, alpha) = (params.s, params.omega, params.alpha);
    check_boosted_domain(s, omega, alpha)?;
    if omega == 0.0 {
        let r = ks_raw(x, y, s, alpha, 1e-9)?;
        return accept_sample(x, y, r);
    }
    if x == 0.0 && y == 0.0 {
        return Err(Error::Quadrature("kernel is singular at the origin".into()));
    }
    let u_hi = (45.0 / alpha).ln();
    let u_lo = if x != 0.0 { (x * x / 240.0).ln().min(-20.0) } else { -34.0 };
    let inner: Box<dyn Fn(f64) -> Complex64> = if (s - 0.5).abs() < 1e-14 {
        // closed form of the eta-integral for s = 1/2
        Box::new(move |t: f64| {
            let den = Complex64::new(t * t * (1.0 - omega * omega) + y * y, -2.0 * omega * t * y);
            Complex64::new(2.0 * t, 0.0) / den
        })
    } else {
        Box::new(move |t: f64| h_drift(y, t, s, omega).unwrap_or(Complex64::new(f64::NAN, 0.0)))
    };
    let weight = move |u: f64| {
        let t: f64 = u.exp();
        let gauss = if x == 0.0 { 1.0 } else { (-x * x / (4.0 * t)).exp() };
        ((-alpha * t).exp() * gauss * t.sqrt(), t)
    };
    let re = adaptive(&|u| { let (w, t) = weight(u); w * inner(t).re }, u_lo, u_hi, 1e-9, 1e-300)?;
    let im = adaptive(&|u| { let (w, t) = weight(u); w * inner(t).im }, u_lo, u_hi, 1e-9, 1e-300)?;
    let g = Complex64::new(re.value, im.value) * C_S;
    if !g.re.is_finite() || !g.im.is_finite() {
        return Err(Error::Quadrature("non-finite boosted kernel integrand".into()));
    }
    let err = C_S * (re.abs_err + im.abs_err) + 1e-9 * g.norm();
    accept_sample(x, y, QuadResult { value: g.norm(), abs_err: err, evals: re.evals + im.evals })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayBound {
    /// |y|^{s-1-k-2sm} |x|^m e^{-|x|}, valid on the whole plane.
    GlobalUpper,
    /// |x|^m |y|^{-1-2s-k-2ms} e^{-|x|/4}, valid for |y| >= 1.
    FarFieldUpper,
    /// Lower bound |x|^m |y|^{-1-2s-k} e^{-x^2/4}, valid for |y| >= 1 >= |x|.
    FarFieldLower,
    /// |y|^{-2} e^{-sqrt(alpha_0)|x|} for the boosted kernel.
    Boosted,
}

impl DecayBound {
    pub fn id(self) -> &'static str {
        match self {
            DecayBound::GlobalUpper => "est-1",
            DecayBound::FarFieldUpper => "1.1-3",
            DecayBound::FarFieldLower => "1.1-4",
            DecayBound::Boosted => "boosted",
        }
    }
}

/// Rectangular sample lattice (inclusive endpoints; a single point when a
/// count is 1).
#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub y0: f64,
    pub y1: f64,
    pub ny: usize,
}

impl Region {
    fn axis(a: f64, b: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            vec![a]
        } else {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x0, self.x1, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y0, self.y1, self.ny)
    }
}

#[derive(Debug, Clone)]
pub struct DecayReport {
    pub bound_id: &'static str,
    pub region: Region,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

/// Certified min/max of |kernel| / bound over the region lattice, with
/// derivative orders m (in x) and k (in y) sampled by centered finite
/// differences of step 1e-3.
pub fn decay_report(
    params: &ModelParams,
    bound: DecayBound,
    region: &Region,
    k: u32,
    m: u32,
) -> Result<DecayReport> {
    let s = params.s;
    validate_s(s)?;
    if region.nx == 0 || region.ny == 0 {
        return Err(Error::Params("empty decay region".into()));
    }
    if k > 1 || m > 1 {
        return Err(Error::Params("derivative orders are limited to k, m <= 1".into()));
    }
    let xs = region.xs();
    let ys = region.ys();
    let min_ay = ys.iter().map(|y| y.abs()).fold(f64::INFINITY, f64::min);
    let max_ax = xs.iter().map(|x| x.abs()).fold(0.0, f64::max);
    match bound {
        DecayBound::FarFieldUpper if min_ay < 1.0 => {
            return Err(Error::Params("far-field bound requires |y| >= 1".into()));
        }
        DecayBound::FarFieldLower if min_ay < 1.0 || max_ax > 1.0 => {
            return Err(Error::Params(
                "far-field lower bound requires |y| >= 1 >= |x|".into(),
            ));
        }
        DecayBound::Boosted if k != 0 || m != 0 => {
            return Err(Error::Params("boosted bound is certified for k = m = 0".into()));
        }
        _ => {}
    }
    let alpha0 = if bound == DecayBound::Boosted {
        params.alpha - omega_one(s, params.omega, params.alpha)?
    } else {
        0.0
    };
    let sample = |x: f64, y: f64| -> Result<f64> {
        match bound {
            DecayBound::Boosted => Ok(g_kernel(x, y, params)?.value),
            _ => Ok(ks_kernel(x, y, s)?.value),
        }
    };
    let h = 1e-3;
    let deriv = |x: f64, y: f64| -> Result<f64> {
        Ok(match (m, k) {
            (0, 0) => sample(x, y)?,
            (1, 0) => (sample(x + h, y)? - sample(x - h, y)?) / (2.0 * h),
            (0, 1) => (sample(x, y + h)? - sample(x, y - h)?) / (2.0 * h),
            _ => {
                (sample(x + h, y + h)? - sample(x + h, y - h)? - sample(x - h, y + h)?
                    + sample(x - h, y - h)?)
                    / (4.0 * h * h)
            }
        })
    };
    let bound_expr = |x: f64, y: f64| -> f64 {
        let (ax, ay) = (x.abs(), y.abs());
        match bound {
            DecayBound::GlobalUpper => {
                ay.powf(s - 1.0 - k as f64 - 2.0 * s * m as f64) * ax.powi(m as i32) * (-ax).exp()
            }
            DecayBound::FarFieldUpper => {
                ax.powi(m as i32)
                    * ay.powf(-1.0 - 2.0 * s - k as f64 - 2.0 * s * m as f64)
                    * (-ax / 4.0).exp()
            }
            DecayBound::FarFieldLower => {
                ax.powi(m as i32) * ay.powf(-1.0 - 2.0 * s - k as f64) * (-x * x / 4.0).exp()
            }
            DecayBound::Boosted => ay.powi(-2) * (-alpha0.sqrt() * ax).exp(),
        }
    };
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for &x in &xs {
        for &y in &ys {
            if m > 0 && x == 0.0 {
                return Err(Error::Params(
                    "bound vanishes at x = 0 for m >= 1; shift the region".into(),
                ));
            }
            let b = bound_expr(x, y);
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::Params(format!(
                    "bound expression degenerate at ({x}, {y})"
                )));
            }
            let r = deriv(x, y)?.abs() / b;
            ratio_min = ratio_min.min(r);
            ratio_max = ratio_max.max(r);
        }
    }
    Ok(DecayReport {
        bound_id: bound.id(),
        region: *region,
        ratio_min,
        ratio_max,
    })
}

/// Residual of the convolution form phi = K_s * (|phi|^{p-2} phi), relative
/// to ||phi||_2. The convolution is applied spectrally with the exact symbol.
pub fn convolution_residual(phi: &Field, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if (params.alpha - 1.0).abs() > 1e-14 {
        return Err(Error::Params(format!(
            "convolution form is stated for alpha = 1, got {}",
            params.alpha
        )));
    }
    if !phi.is_finite() {
        return Err(Error::NonFinite("convolution_residual"));
    }
    let up = to_physical(phi)?;
    let norm2: f64 = up.values.iter().map(|v| v.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(Error::ZeroField("convolution_residual"));
    }
    let mut g = up.clone();
    for v in &mut g.values {
        *v = v.norm().powf(params.p - 2.0) * *v;
    }
    let gh = to_spectral(&g)?;
    let ph = to_spectral(&up)?;
    let grid = ph.grid.clone();
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..grid.nx {
        let xi = grid.xi[k];
        for mm in 0..grid.ny {
            let eta = grid.eta[mm];
            let sym = 1.0 + xi * xi + eta.abs().powf(2.0 * params.s);
            let r = ph.at(k, mm) - gh.at(k, mm) / sym;
            num += r.norm_sqr();
            den += ph.at(k, mm).norm_sqr();
        }
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{from_spectrum, Field, Space};
    use crate::grid::build_grid;

    #[test]
    fn poisson_kernel_closed_form() {
        // s = 1/2: H(y,t) = 2t/(t^2 + y^2)
        for (y, t) in [(1.0, 1.0), (0.0, 2.0), (3.0, 0.5), (25.0, 1.0)] {
            let exact = 2.0 * t / (t * t + y * y);
            let got = hs_profile(y, t, 0.5).unwrap();
            assert!((got - exact).abs() < 1e-9 * exact.max(1e-6), "({y},{t}): {got} vs {exact}");
        }
    }

    #[test]
    fn hs_scaling_property() {
        let (s, y, t) = (0.75, 2.0, 5.0);
        let lhs = hs_profile(y, t, s).unwrap();
        let lam = t.powf(-1.0 / (2.0 * s));
        let rhs = lam * hs_profile(lam * y, 1.0, s).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * rhs.abs().max(1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn hs_positive_and_monotone() {
        let s = 0.6;
        let h0 = hs_profile(0.0, 1.0, s).unwrap();
        assert!(h0 > 0.0);
        let mut prev = h0;
        for i in 1..=20 {
            let h = hs_profile(0.4 * i as f64, 1.0, s).unwrap();
            assert!(h <= prev + 1e-11, "not nonincreasing at y={}", 0.4 * i as f64);
            prev = h;
        }
    }

    #[test]
    fn ks_even_positive_certified() {
        let s = 0.5;
        let a = ks_kernel(0.7, 1.3, s).unwrap();
        for (x, y) in [(-0.7, 1.3), (0.7, -1.3), (-0.7, -1.3)] {
            let b = ks_kernel(x, y, s).unwrap();
            assert!((a.value - b.value).abs() < 1e-12 * a.value);
        }
        assert!(a.value > 0.0);
        assert!(a.abs_err_estimate < 1e-8 * a.value.max(1e-12));
        assert!(ks_kernel(0.0, 0.0, s).is_err());
    }

    #[test]
    fn ks_monotone_in_x() {
        let s = 0.75;
        let mut prev = f64::INFINITY;
        for i in 1..=8 {
            let v = ks_kernel(0.4 * i as f64, 0.0, s).unwrap().value;
            assert!(v < prev, "not decreasing at x={}", 0.4 * i as f64);
            assert!(v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn ks_normalization() {
        for s in [0.5, 0.75] {
            let b = ks_box_integral(s, 20.0, 1000.0).unwrap();
            assert!((b - 1.0).abs() < 1e-3, "s={s}: {b}");
        }
    }

    #[test]
    fn ks_matches_spectral_inverse() {
        // inverse transform of the symbol on a fine periodic lattice
        let g = build_grid(192, 3072, 12.0, 48.0).unwrap();
        let s = 0.5;
        let mut sym = Field::zeros(&g, Space::Spectral);
        for k in 0..g.nx {
            let xi = g.xi[k];
            for m in 0..g.ny {
                let eta = g.eta[m];
                sym.values[k * g.ny + m] =
                    Complex64::new(1.0 / (1.0 + xi * xi + eta.abs().powf(2.0 * s)), 0.0);
            }
        }
        let kgrid = from_spectrum(&sym).unwrap();
        let mut sup = 0.0f64;
        for (x, y) in [(0.5, 0.5), (1.0, 1.0), (0.5, 1.0), (1.0, 0.5), (0.25, 0.75)] {
            let i = ((x + g.lx) / g.dx).round() as usize;
            let j = ((y + g.ly) / g.dy).round() as usize;
            let quad = ks_kernel(x, y, s).unwrap().value;
            sup = sup.max((kgrid.at(i, j).re - quad).abs());
        }
        assert!(sup < 1e-4, "sup deviation {sup}");
    }

    #[test]
    fn decay_reports() {
        let p = ModelParams::new(0.5, 3.0);
        let far = Region { x0: 0.0, x1: 0.0, nx: 1, y0: 1.0, y1: 20.0, ny: 12 };
        let up = decay_report(&p, DecayBound::FarFieldUpper, &far, 0, 0).unwrap();
        assert!(up.ratio_max.is_finite() && up.ratio_max > 0.0);
        assert_eq!(up.bound_id, "1.1-3");
        let lo = decay_report(&p, DecayBound::FarFieldLower, &far, 0, 0).unwrap();
        assert!(lo.ratio_min > 0.0);
        // degenerate single-point region
        let pt = Region { x0: 0.0, x1: 0.0, nx: 1, y0: 1.0, y1: 1.0, ny: 1 };
        let d = decay_report(&p, DecayBound::GlobalUpper, &pt, 0, 0).unwrap();
        assert_eq!(d.ratio_min, d.ratio_max);
        // invalid regions
        let bad = Region { x0: 0.0, x1: 0.0, nx: 1, y0: 0.2, y1: 2.0, ny: 4 };
        assert!(decay_report(&p, DecayBound::FarFieldUpper, &bad, 0, 0).is_err());
        let empty = Region { x0: 0.0, x1: 0.0, nx: 0, y0: 1.0, y1: 2.0, ny: 3 };
        assert!(decay_report(&p, DecayBound::GlobalUpper, &empty, 0, 0).is_err());
    }

    #[test]
    fn decay_ratio_quadrature_stable() {
        // ratios move < 10% under refinement of the quadrature tolerance
        let s = 0.5;
        for y in [2.0, 10.0] {
            let coarse = ks_kernel_with_tol(0.3, y, s, 1e-6).unwrap().value;
            let fine = ks_kernel_with_tol(0.3, y, s, 1e-10).unwrap().value;
            assert!((coarse - fine).abs() < 0.1 * fine.abs());
        }
    }

    #[test]
    fn g_matches_ks_at_zero_speed() {
        let p = ModelParams::new(0.75, 3.0);
        for (x, y) in [(0.5, 0.5), (1.0, 2.0)] {
            let g = g_kernel(x, y, &p).unwrap().value;
            let k = ks_kernel(x, y, 0.75).unwrap().value;
            assert!((g - k).abs() < 1e-6 * k.max(1e-10), "{g} vs {k}");
        }
    }

    #[test]
    fn g_halfwave_drift_vs_general_path() {
        // s = 1/2 closed form against the generic drift integral at s near 1/2
        let p = ModelParams::new(0.5, 3.0).with_omega(0.5);
        let p2 = ModelParams::new(0.5 + 1e-4, 3.0).with_omega(0.5);
        let a = g_kernel(0.5, 1.5, &p).unwrap().value;
        let b = g_kernel(0.5, 1.5, &p2).unwrap().value;
        assert!((a - b).abs() < 1e-2 * a, "{a} vs {b}");
    }

    #[test]
    fn g_boosted_y_decay() {
        // |y|^2 |G(0,y)| bounded for s=1/2, omega=0.5, alpha=1
        let p = ModelParams::new(0.5, 3.0).with_omega(0.5);
        let mut vals = Vec::new();
        for y in [2.0, 5.0, 10.0, 25.0, 50.0] {
            let g = g_kernel(0.0, y, &p).unwrap().value;
            vals.push(y * y * g);
        }
        let sup = vals.iter().cloned().fold(0.0, f64::max);
        assert!(sup.is_finite() && sup > 0.0);
        // no growth trend: the largest y does not dominate the smallest
        assert!(*vals.last().unwrap() < 3.0 * vals[0], "{vals:?}");
    }

    #[test]
    fn g_boosted_x_decay() {
        let p = ModelParams::new(0.5, 3.0).with_omega(0.5);
        let a0 = p.alpha - omega_one(p.s, p.omega, p.alpha).unwrap();
        assert!(a0 > 0.0);
        let mut sup = 0.0f64;
        for i in 0..=10 {
            let x = i as f64;
            let g = g_kernel(x, 1.0, &p).unwrap().value;
            let w = (a0.sqrt() * x).exp() * g;
            assert!(w.is_finite());
            sup = sup.max(w);
        }
        assert!(sup.is_finite() && sup > 0.0);
    }

    #[test]
    fn g_rejects_bad_domains() {
        let fast = ModelParams::new(0.5, 3.0).with_omega(1.2);
        assert!(g_kernel(0.5, 0.5, &fast).is_err());
        let shallow = ModelParams::new(0.75, 3.0).with_omega(3.0).with_alpha(0.1);
        assert!(g_kernel(0.5, 0.5, &shallow).is_err());
        let low_s = ModelParams::new(0.3, 3.0).with_omega(0.5);
        assert!(g_kernel(0.5, 0.5, &low_s).is_err());
    }

    #[test]
    fn convolution_residual_guards() {
        let g = build_grid(32, 32, 4.0, 4.0).unwrap();
        let z = Field::zeros(&g, Space::Physical);
        let p = ModelParams::new(0.5, 3.0);
        assert!(matches!(convolution_residual(&z, &p), Err(Error::ZeroField(_))));
        let u = crate::seeding::gaussian_seed(&g);
        let p2 = ModelParams::new(0.5, 3.0).with_alpha(2.0);
        assert!(convolution_residual(&u, &p2).is_err());
        // arbitrary field: residual is finite and positive
        let r = convolution_residual(&u, &p).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }
}
