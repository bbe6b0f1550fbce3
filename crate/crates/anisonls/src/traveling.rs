//! Boosted traveling waves: the omega_0 floor of the drift quadratic form,
//! Weinstein-quotient minimization for the profile equation
//!
//!     alpha u + D_y^{2s} u + i omega u_y - u_xx = |u|^{p-2} u,
//!
//! Steiner symmetrization in Fourier space, the half-wave Pohozaev identity,
//! decay certification, the mass scaling law near |omega| = 1 and the
//! normalized boosted minimization problem.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{dealias, from_spectrum, to_physical, to_spectral, Field, Space};
use crate::functionals::{
    mass, quadratic_form_omega, spectral_moments, weinstein_quotient, ModelParams, Regime,
};
use crate::grid::GridSpec;
use crate::ground_state::{
    gauge_fix, linear_symbol, lpp_spectral, nonlinear_term, normalized_flow,
    solve_subcritical_with, GroundStateResult, SolverOptions,
};
use crate::kernel::{omega_one, DecayBound, DecayReport, Region};
use crate::seeding::gaussian_seed;

/// Lower bound omega_0 for the drift form: for s in (1/2, 1),
/// <u, D_y^{2s} u + i omega u_y> >= -omega_0 ||u||^2 with
/// omega_0 = (2s-1) |omega/(2s)|^{2s/(2s-1)}, the minimum depth of
/// |eta|^{2s} - omega*eta.
pub fn omega_floor(s: f64, omega: f64) -> Result<f64> {
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::Params(format!(
            "omega floor requires s in (1/2, 1), got {s}; s = 1/2 uses |omega| < 1 instead"
        )));
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * s - 1.0) * (omega.abs() / (2.0 * s)).powf(2.0 * s / (2.0 * s - 1.0)))
}

/// A converged boosted traveling-wave profile.
#[derive(Debug, Clone)]
pub struct BoostedWave {
    /// Gauge-fixed profile phi, scaled to solve the profile equation with the
    /// prescribed alpha.
    pub field: Field,
    pub params: ModelParams,
    /// Weinstein quotient M_omega(phi).
    pub quotient: f64,
    /// Relative Galerkin residual of the profile equation at phi.
    pub el_residual: f64,
    /// Half-wave Pohozaev ratio; populated only for s = 1/2 with omega != 0.
    pub poho_ratio: Option<f64>,
    pub iterations: usize,
    /// Quotient value at every accepted iterate (nonincreasing).
    pub quotient_trace: Vec<f64>,
}

fn check_boosted_params(params: &ModelParams) -> Result<()> {
    params.validate()?;
    let (s, omega, alpha) = (params.s, params.omega, params.alpha);
    if s < 0.5 - 1e-14 {
        return Err(Error::Params(format!(
            "boosted waves need s >= 1/2 (the drift dominates |eta|^{{2s}} otherwise), got s={s}"
        )));
    }
    if params.p >= params.p_max() {
        return Err(Error::NoSolutionRange {
            s,
            p: params.p,
        });
    }
    if (s - 0.5).abs() >= 1e-12 {
        let w0 = omega_floor(s, omega)?;
        if alpha <= w0 {
            return Err(Error::Params(format!(
                "alpha = {alpha} must exceed the drift floor omega_0 = {w0:.6e}"
            )));
        }
    }
    Ok(())
}

/// Gaussian seed modulated to the lattice frequency nearest the minimum of the
/// drifted dispersion in eta, so the first iterates already live on the branch
/// the drift selects.
fn modulated_seed(grid: &Arc<GridSpec>, s: f64, omega: f64) -> Field {
    let eta0 = if omega == 0.0 {
        0.0
    } else if s > 0.5 {
        omega.signum() * (omega.abs() / (2.0 * s)).powf(1.0 / (2.0 * s - 1.0))
    } else {
        // s = 1/2: the symbol has no interior minimum; aim at the frequency
        // scale 1/(1 - |omega|) on which the minimizer concentrates
        omega.signum() / (1.0 - omega.abs())
    };
    let deta = std::f64::consts::PI / grid.ly;
    let eta_lat = (eta0 / deta).round() * deta;
    let mut u = gaussian_seed(grid);
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let y = grid.y(j);
            u.values[i * grid.ny + j] *= Complex64::new(0.0, eta_lat * y).exp();
        }
    }
    u
}

pub fn solve_boosted(
    params: &ModelParams,
    grid: &Arc<GridSpec>,
    seed: Option<&Field>,
) -> Result<BoostedWave> {
    solve_boosted_with(params, grid, seed, &SolverOptions::default())
}

/// Minimize the Weinstein quotient M_omega over the grid by a preconditioned
/// descent whose full step is the normalized Petviashvili map, with
/// backtracking that accepts only quotient-nonincreasing iterates; the
/// converged critical point is rescaled by homogeneity to solve the profile
/// equation with the prescribed alpha.
pub fn solve_boosted_with(
    params: &ModelParams,
    grid: &Arc<GridSpec>,
    seed: Option<&Field>,
    opts: &SolverOptions,
) -> Result<BoostedWave> {
    check_boosted_params(params)?;
    let (s, p, alpha, omega) = (params.s, params.p, params.alpha, params.omega);
    // the lattice form goes negative before the |omega| < 1 frontier is
    // checked: on an eta range beyond alpha/(|omega|-1) this is exactly the
    // unboundedness behind the s = 1/2 non-existence result
    let qmin = quadratic_form_omega(grid, params)?;
    if qmin <= 0.0 {
        return Err(Error::QuadraticFormIndefinite { min: qmin, omega });
    }
    if (s - 0.5).abs() < 1e-12 && omega.abs() >= 1.0 {
        return Err(Error::Params(format!(
            "s = 1/2 requires |omega| < 1, got omega = {omega}"
        )));
    }
    let lsym: Vec<f64> = linear_symbol(grid, s, omega)
        .into_iter()
        .map(|l| l + alpha)
        .collect();
    let w = grid.spectral_weight();
    let seed_phys = match seed {
        Some(f) => to_physical(f)?,
        None => modulated_seed(grid, s, omega),
    };
    // iterates live on the dealiased band with ||u||_p = 1: the quotient is
    // scale-free, and the unit normalization removes the amplitude mode that
    // the classical Petviashvili exponent would otherwise have to stabilize
    let mut uh = dealias(&to_spectral(&seed_phys)?)?;
    normalize_lp(&mut uh, p)?;
    let mut u = from_spectrum(&uh)?;
    let mut quad: f64 = lsym
        .iter()
        .zip(&uh.values)
        .map(|(&l, v)| l * v.norm_sqr())
        .sum::<f64>()
        * w;
    let mut quotient = quad.powf(p / 2.0);
    let mut trace = Vec::new();
    let mut tau = 1.0f64;
    let mut residual = f64::INFINITY;
    let mut n_factor = 0.0;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it;
        trace.push(quotient);
        let fh = dealias(&to_spectral(&nonlinear_term(&u, p))?)?;
        let mut pair = 0.0;
        let mut rnum = 0.0;
        let mut den = 0.0;
        for (idx, &l) in lsym.iter().enumerate() {
            let uv = uh.values[idx];
            let fv = fh.values[idx];
            pair += (fv.conj() * uv).re;
            den += (uv * l).norm_sqr();
        }
        pair *= w;
        n_factor = quad / pair;
        for (idx, &l) in lsym.iter().enumerate() {
            rnum += (uh.values[idx] * l - fh.values[idx] * n_factor).norm_sqr();
        }
        residual = (rnum / den).sqrt();
        if residual <= opts.tol {
            break;
        }
        if pair <= 0.0 {
            return Err(Error::NonConvergence {
                iterations: it,
                residual,
            });
        }
        // descent with backtracking: the full step tau = 1 is the normalized
        // Petviashvili update N * L^{-1} F(u)
        let mut stepped = false;
        while tau >= 1e-10 {
            let mut vh = uh.clone();
            for (idx, &l) in lsym.iter().enumerate() {
                let target = fh.values[idx] * (n_factor / l);
                vh.values[idx] = uh.values[idx] * (1.0 - tau) + target * tau;
            }
            normalize_lp(&mut vh, p)?;
            let quad_v: f64 = lsym
                .iter()
                .zip(&vh.values)
                .map(|(&l, v)| l * v.norm_sqr())
                .sum::<f64>()
                * w;
            let q_v = quad_v.powf(p / 2.0);
            if !q_v.is_finite() {
                return Err(Error::NonFinite("boosted quotient"));
            }
            if q_v <= quotient * (1.0 + 1e-13) {
                u = from_spectrum(&vh)?;
                uh = vh;
                quad = quad_v;
                quotient = q_v;
                tau = (tau * 2.0).min(1.0);
                stepped = true;
                break;
            }
            tau *= 0.5;
        }
        if !stepped {
            // quotient stationary to round-off
            break;
        }
    }
    if residual > opts.tol {
        return Err(Error::NonConvergence {
            iterations,
            residual,
        });
    }
    // homogeneity rescale: L u = N F(u) at the critical point, so lambda u
    // with lambda^{p-2} = N solves L phi = F(phi)
    let lambda = n_factor.powf(1.0 / (p - 2.0));
    let mut phi = u;
    phi.scale(Complex64::new(lambda, 0.0));
    let phi = gauge_fix(&phi)?;
    let poho_ratio = if (s - 0.5).abs() < 1e-12 && omega != 0.0 {
        Some(half_wave_pohozaev(&phi, omega)?)
    } else {
        None
    };
    Ok(BoostedWave {
        quotient: weinstein_quotient(&phi, params)?,
        el_residual: el_residual(&phi, params)?,
        poho_ratio,
        iterations,
        quotient_trace: trace,
        field: phi,
        params: *params,
    })
}

fn normalize_lp(uh: &mut Field, p: f64) -> Result<()> {
    let lpp = lpp_spectral(uh, p)?;
    if lpp <= 0.0 {
        return Err(Error::ZeroField("boosted normalize"));
    }
    uh.scale(Complex64::new(lpp.powf(-1.0 / p), 0.0));
    Ok(())
}

/// Relative Galerkin residual of the profile equation
/// (alpha + xi^2 + |eta|^{2s} - omega eta) u_hat = (|u|^{p-2} u)_hat
/// with the nonlinearity 2/3-truncated (the solver's convergence measure).
pub fn el_residual(u: &Field, params: &ModelParams) -> Result<f64> {
    let up = to_physical(u)?;
    let uh = to_spectral(&up)?;
    let fh = dealias(&to_spectral(&nonlinear_term(&up, params.p))?)?;
    let g = &uh.grid;
    let lsym = linear_symbol(g, params.s, params.omega);
    let mut num = 0.0;
    let mut den = 0.0;
    for (idx, &l) in lsym.iter().enumerate() {
        let la = l + params.alpha;
        num += (uh.values[idx] * la - fh.values[idx]).norm_sqr();
        den += (uh.values[idx] * la).norm_sqr();
    }
    if den == 0.0 {
        return Err(Error::ZeroField("el_residual"));
    }
    Ok((num / den).sqrt())
}

/// Steiner symmetrization in Fourier space: for each fixed xi column the
/// magnitudes |u_hat(xi, .)| are rearranged symmetric-decreasing in eta
/// (slots ordered by |eta|, ties broken toward positive eta) and the phases
/// dropped, giving a real spectrum even in eta up to the tie-breaking.
pub fn steiner_symmetrize(u: &Field) -> Result<Field> {
    let uh = to_spectral(u)?;
    let g = uh.grid.clone();
    // slot order: eta = 0, +d, -d, +2d, -2d, ...
    let mut slots: Vec<usize> = (0..g.ny).collect();
    slots.sort_by(|&a, &b| {
        let (ea, eb) = (g.eta[a], g.eta[b]);
        ea.abs()
            .total_cmp(&eb.abs())
            .then_with(|| eb.total_cmp(&ea))
    });
    let mut out = Field::zeros(&g, Space::Spectral);
    let mut mags = vec![0.0f64; g.ny];
    for k in 0..g.nx {
        for m in 0..g.ny {
            mags[m] = uh.values[k * g.ny + m].norm();
        }
        mags.sort_by(|a, b| b.total_cmp(a));
        for (rank, &slot) in slots.iter().enumerate() {
            out.values[k * g.ny + slot] = Complex64::new(mags[rank], 0.0);
        }
    }
    from_spectrum(&out)
}

/// Pohozaev ratio of the s = 1/2 profile equation:
/// (int sgn(eta) |phi_hat|^2) / (omega ||phi||_2^2), equal to 1 at a
/// traveling wave. Zero for real fields (even spectrum): a real profile
/// cannot be a boosted wave with omega != 0.
pub fn half_wave_pohozaev(phi: &Field, omega: f64) -> Result<f64> {
    if omega == 0.0 {
        return Err(Error::Params(
            "the Pohozaev ratio is undefined at omega = 0; the identity degenerates to \
             int sgn(eta)|phi_hat|^2 = 0"
                .into(),
        ));
    }
    let uh = to_spectral(&to_physical(phi)?)?;
    let g = &uh.grid;
    let w = g.spectral_weight();
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..g.nx {
        for m in 0..g.ny {
            let a = uh.values[k * g.ny + m].norm_sqr() * w;
            den += a;
            if !g.is_nyquist_y(m) {
                num += g.eta[m].signum() * a;
            }
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroField("half_wave_pohozaev"));
    }
    Ok(num / (omega * den))
}

/// Certify the boosted spatial decay |y|^2 e^{sqrt(alpha_0)|x|} |phi| bounded
/// over the outer region |y| in [3, ly/2], |x| <= min(3, lx/2), with alpha_0
/// derived from the kernel module's drift-taming scan.
pub fn boosted_decay_check(wave: &BoostedWave) -> Result<DecayReport> {
    let params = &wave.params;
    let up = to_physical(&wave.field)?;
    let g = &up.grid;
    let y_in = 3.0;
    let y_out = g.ly / 2.0;
    if y_out <= y_in {
        return Err(Error::Params(format!(
            "decay region |y| in [{y_in}, ly/2] exceeds the box (ly = {})",
            g.ly
        )));
    }
    let x_max = 3.0f64.min(g.lx / 2.0);
    let alpha0 = params.alpha - omega_one(params.s, params.omega, params.alpha)?;
    let rate = alpha0.sqrt();
    let (mut sup, mut inf) = (0.0f64, f64::INFINITY);
    let (mut ncx, mut ncy) = (0usize, 0usize);
    for i in 0..g.nx {
        let x = g.x(i);
        if x.abs() > x_max {
            continue;
        }
        ncx += 1;
        let mut col_in = 0usize;
        for j in 0..g.ny {
            let y = g.y(j);
            if y.abs() < y_in || y.abs() > y_out {
                continue;
            }
            col_in += 1;
            let v = y * y * (rate * x.abs()).exp() * up.at(i, j).norm();
            sup = sup.max(v);
            inf = inf.min(v);
        }
        ncy = ncy.max(col_in);
    }
    if ncx == 0 || ncy == 0 {
        return Err(Error::Params("decay region contains no grid points".into()));
    }
    Ok(DecayReport {
        bound_id: DecayBound::Boosted.id(),
        region: Region {
            x0: -x_max,
            x1: x_max,
            nx: ncx,
            y0: y_in,
            y1: y_out,
            ny: ncy,
        },
        ratio_min: inf,
        ratio_max: sup,
    })
}

/// The mass scaling law of the s = 1/2 boosted waves near |omega| = 1.
#[derive(Debug, Clone)]
pub struct ScalingStudy {
    pub omegas: Vec<f64>,
    /// ||u_omega||_2 per omega.
    pub masses: Vec<f64>,
    /// ||u_omega||_Hdot per omega.
    pub hdots: Vec<f64>,
    /// Weinstein quotient per omega.
    pub quotients: Vec<f64>,
    /// Log-log slope of ||u_omega||_2 against 1 - |omega| (expected 3/4).
    pub fitted_slope: f64,
    /// Log-log slope of ||u_omega||_Hdot against 1 - |omega| (expected <= ~1/4).
    pub hdot_slope: f64,
}

fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

pub fn mass_scaling_study(
    omegas: &[f64],
    params: &ModelParams,
    grid: &Arc<GridSpec>,
) -> Result<ScalingStudy> {
    mass_scaling_study_with(omegas, params, grid, &SolverOptions::default())
}

/// Solve the boosted problem at each omega (concurrently; the profile
/// equation with the given alpha is the normalization under which the scaling
/// law is stated) and fit log ||u_omega||_2 against log(1 - |omega|).
pub fn mass_scaling_study_with(
    omegas: &[f64],
    params: &ModelParams,
    grid: &Arc<GridSpec>,
    opts: &SolverOptions,
) -> Result<ScalingStudy> {
    if (params.s - 0.5).abs() > 1e-12 {
        return Err(Error::RegimeMismatch(format!(
            "the mass scaling law is specific to s = 1/2, got s = {}",
            params.s
        )));
    }
    if omegas.len() < 2 {
        return Err(Error::Params("mass scaling fit needs >= 2 points".into()));
    }
    for &w in omegas {
        if w.abs() >= 1.0 {
            return Err(Error::Params(format!("|omega| < 1 required, got {w}")));
        }
    }
    let results: Vec<Result<BoostedWave>> = std::thread::scope(|scope| {
        let handles: Vec<_> = omegas
            .iter()
            .map(|&w| {
                let pw = params.with_omega(w);
                scope.spawn(move || solve_boosted_with(&pw, grid, None, opts))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
    });
    let mut masses = Vec::with_capacity(omegas.len());
    let mut hdots = Vec::with_capacity(omegas.len());
    let mut quotients = Vec::with_capacity(omegas.len());
    for r in results {
        let wave = r?;
        let m = spectral_moments(&wave.field, params.s)?;
        masses.push(m.mass.sqrt());
        hdots.push((m.kx2 + m.ky2s).sqrt());
        quotients.push(wave.quotient);
    }
    let gaps: Vec<f64> = omegas.iter().map(|w| 1.0 - w.abs()).collect();
    Ok(ScalingStudy {
        fitted_slope: fit_loglog_slope(&gaps, &masses),
        hdot_slope: fit_loglog_slope(&gaps, &hdots),
        omegas: omegas.to_vec(),
        masses,
        hdots,
        quotients,
    })
}

pub fn normalized_boosted_min(
    c: f64,
    params: &ModelParams,
    grid: &Arc<GridSpec>,
) -> Result<GroundStateResult> {
    normalized_boosted_min_with(c, params, grid, &SolverOptions::default())
}

/// Minimize the boosted energy E_omega over the mass sphere ||u||_2^2 = c
/// (mass-subcritical p), warm-seeded with the zero-speed normalized ground
/// state. The returned energy m_omega(c) is negative: the drift only lowers
/// the infimum, by at least omega_0 c / 2.
pub fn normalized_boosted_min_with(
    c: f64,
    params: &ModelParams,
    grid: &Arc<GridSpec>,
    opts: &SolverOptions,
) -> Result<GroundStateResult> {
    if params.regime() != Regime::Subcritical {
        return Err(Error::RegimeMismatch(format!(
            "normalized boosted minimization needs p < {} (mass-subcritical), got p = {}",
            params.p_critical(),
            params.p
        )));
    }
    if params.s < 0.5 - 1e-14 {
        return Err(Error::Params(format!(
            "boosted minimization needs s >= 1/2, got s = {}",
            params.s
        )));
    }
    if (params.s - 0.5).abs() < 1e-12 && params.omega.abs() >= 1.0 {
        return Err(Error::Params(format!(
            "s = 1/2 requires |omega| < 1, got omega = {}",
            params.omega
        )));
    }
    if params.omega == 0.0 {
        return solve_subcritical_with(c, params, grid, opts);
    }
    let seed = solve_subcritical_with(c, &params.with_omega(0.0), grid, opts)?;
    normalized_flow(c, params, grid, opts, Some(&seed.field), false, true, None)
}
