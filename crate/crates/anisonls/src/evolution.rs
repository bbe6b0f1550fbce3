//! Split-step time integration of the Cauchy problem
//!
//!     i u_t + u_xx - D_y^{2s} u + |u|^{p-2} u = 0,
//!
//! with conservation tracking, the localized virial quantities built from the
//! cutoff theta_R, and heuristic blow-up classification based on the sign of
//! the Pohozaev quantity Q along the run.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{from_spectrum, to_physical, to_spectrum, Field};
use crate::functionals::{
    diagnostics, energy, hdot, scale_field, Diagnostics, ModelParams, Regime,
};
use crate::grid::freq_index;
use crate::grid::GridSpec;
use crate::symbol::{apply_symbol, multiply_in_place, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Half nonlinear phase, full linear multiplier, half nonlinear (order 2).
    Strang,
    /// Full nonlinear phase then full linear multiplier (order 1).
    Lie,
}

/// A stored run: diagnostics at every step, optional field snapshots.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Strictly increasing sample times, starting at 0.
    pub times: Vec<f64>,
    /// One record per entry of `times`.
    pub diagnostics: Vec<Diagnostics>,
    /// (time, field) checkpoints; empty unless requested.
    pub snapshots: Vec<(f64, Field)>,
    pub dt: f64,
    pub scheme: Scheme,
    /// Set when the run hit non-finite values and stopped early; the abort
    /// time is a numerical blow-up proxy.
    pub aborted_at: Option<f64>,
}

/// One split step. The nonlinear sub-flow is the exact phase rotation
/// u -> e^{i tau |u|^{p-2}} u (|u| is invariant under it), the linear sub-flow
/// is the exact multiplier e^{-i dt (xi^2 + |eta|^{2s})}; both preserve the
/// mass to round-off.
pub fn step(u: &Field, dt: f64, params: &ModelParams, scheme: Scheme) -> Result<Field> {
    if !(dt > 0.0) {
        return Err(Error::Params(format!("time step must be positive, got {dt}")));
    }
    let mut v = to_physical(u)?;
    let (s, p) = (params.s, params.p);
    let nonlinear_phase = |v: &mut Field, tau: f64| {
        for z in &mut v.values {
            let phase = tau * z.norm().powf(p - 2.0);
            *z *= Complex64::new(0.0, phase).exp();
        }
    };
    match scheme {
        Scheme::Strang => nonlinear_phase(&mut v, dt / 2.0),
        Scheme::Lie => nonlinear_phase(&mut v, dt),
    }
    let mut vh = to_spectrum(&v)?;
    multiply_in_place(&mut vh, Symbol::LinearPhase { dt, s });
    v = from_spectrum(&vh)?;
    if let Scheme::Strang = scheme {
        nonlinear_phase(&mut v, dt / 2.0);
    }
    if !v.is_finite() {
        return Err(Error::NonFinite("split step"));
    }
    Ok(v)
}

pub fn evolve(u0: &Field, t_final: f64, dt: f64, params: &ModelParams) -> Result<Trajectory> {
    evolve_with(u0, t_final, dt, params, Scheme::Strang, 0)
}

/// Evolve to `t_final`, recording diagnostics at every step and a field
/// snapshot every `snapshot_every` steps (0 = no snapshots). The step is
/// shrunk slightly so an integer number of steps lands on `t_final` exactly.
/// Non-finite values abort the run, returning the partial trajectory with
/// `aborted_at` set.
pub fn evolve_with(
    u0: &Field,
    t_final: f64,
    dt: f64,
    params: &ModelParams,
    scheme: Scheme,
    snapshot_every: usize,
) -> Result<Trajectory> {
    if !(t_final > 0.0) {
        return Err(Error::Params(format!("horizon must be positive, got {t_final}")));
    }
    if !(dt > 0.0 && dt <= t_final) {
        return Err(Error::Params(format!(
            "time step must lie in (0, {t_final}], got {dt}"
        )));
    }
    let nsteps = (t_final / dt).ceil().max(1.0) as usize;
    let dt = t_final / nsteps as f64;
    let mut u = to_physical(u0)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        diagnostics: vec![diagnostics(&u, params, 0.0, None)?],
        snapshots: Vec::new(),
        dt,
        scheme,
        aborted_at: None,
    };
    if snapshot_every > 0 {
        traj.snapshots.push((0.0, u.clone()));
    }
    for k in 1..=nsteps {
        let t = k as f64 * dt;
        match step(&u, dt, params, scheme) {
            Ok(next) => u = next,
            Err(Error::NonFinite(_)) => {
                traj.aborted_at = Some(t);
                return Ok(traj);
            }
            Err(e) => return Err(e),
        }
        let d = match diagnostics(&u, params, t, None) {
            Ok(d) => d,
            Err(Error::NonFinite(_)) => {
                traj.aborted_at = Some(t);
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        traj.times.push(t);
        traj.diagnostics.push(d);
        if snapshot_every > 0 && (k % snapshot_every == 0 || k == nsteps) {
            traj.snapshots.push((t, u.clone()));
        }
    }
    Ok(traj)
}

// ---------------------------------------------------------------------------
// Localized virial quantities
// ---------------------------------------------------------------------------

/// The cutoff theta_R(r) = R^2 theta(r/R) with theta(r) = r^2 on [0,1),
/// a quintic blend on [1,2], and the constant 2 beyond, together with its
/// first four derivatives sampled on the grid axes.
#[derive(Debug, Clone)]
pub struct Cutoff {
    pub r: f64,
    /// [theta_R, theta_R', ..., theta_R''''] at each x node.
    pub theta_x: Vec<[f64; 5]>,
    /// Same at each y node.
    pub theta_y: Vec<[f64; 5]>,
}

/// theta_R and its first four derivatives at r (even extension to r < 0).
///
/// The blend on [1,2] is the quintic Hermite interpolant of (r^2, 2r, 2) at
/// r = 1 and (2, 0, 0) at r = 2: h(t) = 1 + 2t + t^2 - 5t^3 + 4t^4 - t^5 with
/// t = r - 1. Its second derivative is 2 - 2t(10t^2 - 24t + 15), and
/// 10t^2 - 24t + 15 > 0 for all t, so theta'' <= 2 everywhere with equality
/// exactly on the quadratic zone.
pub fn theta_r(r_cut: f64, r: f64, k: usize) -> f64 {
    assert!(k <= 4, "only derivatives up to order 4 are tabulated");
    let t = r.abs() / r_cut;
    // value of theta^{(k)} at t >= 0
    let base = if t < 1.0 {
        match k {
            0 => t * t,
            1 => 2.0 * t,
            2 => 2.0,
            _ => 0.0,
        }
    } else if t < 2.0 {
        let u = t - 1.0;
        match k {
            0 => 1.0 + u * (2.0 + u * (1.0 + u * (-5.0 + u * (4.0 - u)))),
            1 => 2.0 + u * (2.0 + u * (-15.0 + u * (16.0 - 5.0 * u))),
            2 => 2.0 + u * (-30.0 + u * (48.0 - 20.0 * u)),
            3 => -30.0 + u * (96.0 - 60.0 * u),
            _ => 96.0 - 120.0 * u,
        }
    } else {
        match k {
            0 => 2.0,
            _ => 0.0,
        }
    };
    // theta_R^{(k)}(r) = R^{2-k} theta^{(k)}(|r|/R); odd derivatives of the
    // even extension flip sign for r < 0
    let sign = if k % 2 == 1 && r < 0.0 { -1.0 } else { 1.0 };
    sign * r_cut.powi(2 - k as i32) * base
}

pub fn build_cutoff(r_cut: f64, grid: &Arc<GridSpec>) -> Result<Cutoff> {
    if !(r_cut > 1.0) {
        return Err(Error::Cutoff(format!("cutoff radius must exceed 1, got {r_cut}")));
    }
    if 2.0 * r_cut > grid.lx.min(grid.ly) {
        return Err(Error::Cutoff(format!(
            "plateau radius 2R = {} does not fit the box ({}, {})",
            2.0 * r_cut,
            grid.lx,
            grid.ly
        )));
    }
    let sample = |r: f64| -> [f64; 5] {
        [0, 1, 2, 3, 4].map(|k| theta_r(r_cut, r, k))
    };
    Ok(Cutoff {
        r: r_cut,
        theta_x: (0..grid.nx).map(|i| sample(grid.x(i))).collect(),
        theta_y: (0..grid.ny).map(|j| sample(grid.y(j))).collect(),
    })
}

/// The localized virial quantity
///
///     M_{phi_R}(u) = 2 Im <u, grad phi_R . grad u>,
///     phi_R(x, y) = s theta_R(x) + theta_R(y),
///
/// i.e. 2 Im sum conj(u) (s theta_R'(x) u_x + theta_R'(y) u_y) dx dy.
pub fn virial_m(u: &Field, cutoff: &Cutoff, params: &ModelParams) -> Result<f64> {
    let up = to_physical(u)?;
    let g = &up.grid;
    if cutoff.theta_x.len() != g.nx || cutoff.theta_y.len() != g.ny {
        return Err(Error::Cutoff("cutoff sampled on a different grid".into()));
    }
    let ux = apply_symbol(&up, Symbol::Dx)?;
    let uy = apply_symbol(&up, Symbol::Dy)?;
    let s = params.s;
    let mut acc = 0.0;
    for i in 0..g.nx {
        let tx1 = cutoff.theta_x[i][1];
        for j in 0..g.ny {
            let ty1 = cutoff.theta_y[j][1];
            let idx = i * g.ny + j;
            let grad = s * tx1 * ux.values[idx] + ty1 * uy.values[idx];
            acc += (up.values[idx].conj() * grad).im;
        }
    }
    let m = 2.0 * acc * g.cell();
    if !m.is_finite() {
        return Err(Error::NonFinite("virial_m"));
    }
    Ok(m)
}

/// Finite-difference check of the virial derivative bound
///
///     dM_{phi_R}/dt <= 8 Q(u) + C (R^{-2} + R^{-2s}) ||u||_2^2
///                      + C ||u||_{L^2(|x| or |y| >= R)}^{q0},
///
/// with q0 = (p + 2)/2 in (2, p) and the reported constant C = 1.
#[derive(Debug, Clone)]
pub struct VirialReport {
    /// Interior snapshot times where the derivative was differenced.
    pub times: Vec<f64>,
    pub dmdt: Vec<f64>,
    /// Right-hand side of the bound at the same times.
    pub bound: Vec<f64>,
    /// min(bound - dmdt); the lemma predicts margin > 0.
    pub margin: f64,
    /// Constant used in the correction terms.
    pub c_const: f64,
}

pub fn virial_derivative_check(
    traj: &Trajectory,
    cutoff: &Cutoff,
    params: &ModelParams,
) -> Result<VirialReport> {
    if traj.snapshots.len() < 3 {
        return Err(Error::Params(format!(
            "virial derivative check needs at least 3 snapshots, got {}",
            traj.snapshots.len()
        )));
    }
    let c_const = 1.0;
    let q0 = (params.p + 2.0) / 2.0;
    let mv: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|(_, u)| virial_m(u, cutoff, params))
        .collect::<Result<_>>()?;
    let mut times = Vec::new();
    let mut dmdt = Vec::new();
    let mut bound = Vec::new();
    for k in 1..traj.snapshots.len() - 1 {
        let (t_prev, _) = &traj.snapshots[k - 1];
        let (t, u) = &traj.snapshots[k];
        let (t_next, _) = &traj.snapshots[k + 1];
        let deriv = (mv[k + 1] - mv[k - 1]) / (t_next - t_prev);
        let d = diagnostics(u, params, *t, None)?;
        // mass in the region where the cutoff departs from the quadratic zone
        let g = &u.grid;
        let mut outer = 0.0;
        for i in 0..g.nx {
            let x_out = g.x(i).abs() >= cutoff.r;
            for j in 0..g.ny {
                if x_out || g.y(j).abs() >= cutoff.r {
                    outer += u.at(i, j).norm_sqr();
                }
            }
        }
        outer *= g.cell();
        let correction = c_const
            * ((cutoff.r.powi(-2) + cutoff.r.powf(-2.0 * params.s)) * d.mass
                + outer.powf(q0 / 2.0));
        times.push(*t);
        dmdt.push(deriv);
        bound.push(8.0 * d.q + correction);
    }
    let margin = dmdt
        .iter()
        .zip(&bound)
        .map(|(d, b)| b - d)
        .fold(f64::INFINITY, f64::min);
    Ok(VirialReport {
        times,
        dmdt,
        bound,
        margin,
        c_const,
    })
}

// ---------------------------------------------------------------------------
// Blow-up classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupClass {
    BlowupSuspected,
    GlobalSuspected,
    Undetermined,
}

#[derive(Debug, Clone)]
pub struct BlowupVerdict {
    pub classification: BlowupClass,
    /// Max of Q(u(t)) over the run.
    pub q_max: f64,
    /// ||u(T)||_Hdot / ||u(0)||_Hdot (at the last finite sample).
    pub hdot_growth: f64,
    pub criteria_used: Vec<String>,
}

/// Growth of the Hdot-seminorm beyond which a run with uniformly negative Q
/// is declared a suspected blow-up.
const GROWTH_THRESHOLD: f64 = 3.0;

/// Fraction of the Hdot-seminorm carried by modes outside the 2/3 dealias
/// band: a resolution-loss indicator for collapsing solutions.
fn band_edge_fraction(u: &Field, s: f64) -> Result<f64> {
    let uh = to_spectrum(&to_physical(u)?)?;
    let g = &uh.grid;
    let in_band = |idx: i64, n: usize| -> bool {
        let m = (n / 3) as i64;
        if 3 * (n / 3) == n {
            idx >= -m && idx < m
        } else {
            idx.abs() <= m
        }
    };
    let (mut tail, mut total) = (0.0, 0.0);
    for k in 0..g.nx {
        let xi = g.xi[k];
        let kx = freq_index(k, g.nx);
        for m in 0..g.ny {
            let eta = g.eta[m];
            let w = (xi * xi + eta.abs().powf(2.0 * s)) * uh.values[k * g.ny + m].norm_sqr();
            total += w;
            if !(in_band(kx, g.nx) && in_band(freq_index(m, g.ny), g.ny)) {
                tail += w;
            }
        }
    }
    Ok(if total > 0.0 { tail / total } else { 0.0 })
}

/// Evolve `u0` to `horizon` and classify per the virial blow-up criteria:
/// blow-up is suspected when Q(u(t)) <= -delta < 0 throughout and the
/// Hdot-seminorm grows past 3x (or the run aborts on NaN); a bounded run
/// whose Q fails to stay uniformly negative is suspected global.
pub fn classify_blowup(
    u0: &Field,
    params: &ModelParams,
    horizon: f64,
) -> Result<BlowupVerdict> {
    let supercritical_window = params.s > 0.5
        && params.s < 1.0
        && params.regime() == Regime::Supercritical
        && params.p < params.p_max();
    let critical_negative =
        params.regime() == Regime::Critical && energy(u0, params)? < 0.0;
    if !(supercritical_window || critical_negative) {
        return Err(Error::RegimeMismatch(format!(
            "blow-up criteria need s in (1/2,1) with {} < p < {}, or the critical exponent with E(u0) < 0; got s = {}, p = {}",
            params.p_critical(),
            params.p_max(),
            params.s,
            params.p
        )));
    }
    // run the evolution, stopping early when the solution can no longer be
    // trusted: NaN, or the collapsing profile reaching the grid scale (a
    // growing fraction of the Hdot-seminorm at the unresolved band edge);
    // both are numerical blow-up proxies, and diagnostics past that point
    // are meaningless
    let nsteps = 512usize;
    let dt = horizon / nsteps as f64;
    let mut u = to_physical(u0)?;
    let mut records = vec![diagnostics(&u, params, 0.0, None)?];
    let mut abort: Option<(f64, &'static str)> = None;
    for k in 1..=nsteps {
        let t = k as f64 * dt;
        match step(&u, dt, params, Scheme::Strang) {
            Ok(next) => u = next,
            Err(Error::NonFinite(_)) => {
                abort = Some((t, "non-finite values"));
                break;
            }
            Err(e) => return Err(e),
        }
        if band_edge_fraction(&u, params.s)? > 1e-2 {
            abort = Some((t, "resolution loss at the band edge"));
            break;
        }
        records.push(diagnostics(&u, params, t, None)?);
    }
    let q_max = records.iter().map(|d| d.q).fold(f64::NEG_INFINITY, f64::max);
    let h0 = records[0].hdot;
    let h_last = records.last().map(|d| d.hdot).unwrap_or(h0);
    let h_max = records.iter().map(|d| d.hdot).fold(0.0, f64::max);
    let hdot_growth = if h0 > 0.0 { h_last / h0 } else { 1.0 };
    let growth = h_max / h0.max(1e-300);
    let mut criteria = Vec::new();
    let classification = if q_max < 0.0 && (abort.is_some() || growth > GROWTH_THRESHOLD) {
        criteria.push(format!("Q(u(t)) <= {q_max:.3e} < 0 throughout"));
        if let Some((t, why)) = abort {
            criteria.push(format!("aborted at t = {t:.4}: {why} (blow-up proxy)"));
        } else {
            criteria.push(format!("Hdot growth {growth:.2} exceeded {GROWTH_THRESHOLD}"));
        }
        BlowupClass::BlowupSuspected
    } else if abort.is_none() && q_max >= 0.0 && growth <= GROWTH_THRESHOLD {
        criteria.push("Q(u(t)) not uniformly negative".into());
        criteria.push(format!("Hdot stayed within {growth:.2}x of the initial value"));
        BlowupClass::GlobalSuspected
    } else {
        criteria.push(format!(
            "inconclusive: q_max = {q_max:.3e}, Hdot growth {growth:.2}, aborted = {}",
            abort.is_some()
        ));
        BlowupClass::Undetermined
    };
    Ok(BlowupVerdict {
        classification,
        q_max,
        hdot_growth,
        criteria_used: criteria,
    })
}

/// Strong-instability perturbation phi_lambda(x,y) =
/// lambda^{(s+1)/2} phi(lambda^s x, lambda y) of a constrained ground state:
/// for lambda > 1 it lowers the energy and raises the Hdot-seminorm, which is
/// verified before returning.
pub fn instability_data(phi: &Field, lambda: f64, params: &ModelParams) -> Result<Field> {
    if !(lambda > 1.0) {
        return Err(Error::Params(format!(
            "instability data needs lambda > 1 (a strictly supercritical perturbation), got {lambda}"
        )));
    }
    let scaled = scale_field(phi, lambda, params.s)?;
    let (e0, e1) = (energy(phi, params)?, energy(&scaled, params)?);
    let (h0, h1) = (hdot(phi, params.s)?, hdot(&scaled, params.s)?);
    if !(e1 < e0 && h1 > h0) {
        return Err(Error::Other(format!(
            "scaled datum failed the instability inequalities: E {e0:.6e} -> {e1:.6e}, Hdot {h0:.6e} -> {h1:.6e} (phi is not a ground state on this grid)"
        )));
    }
    Ok(scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Space;
    use crate::functionals::{lp_power, mass};
    use crate::grid::build_grid;
    use crate::ground_state::solve_fixed_alpha;
    use crate::seeding::gaussian_seed;
    use std::f64::consts::PI;

    fn sup_diff(a: &Field, b: &Field) -> f64 {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn linear_limit_plane_wave() {
        // amplitude 1e-12 makes the nonlinear phase negligible; mode (1,1)
        // picks up exactly e^{-i dt (1 + 1)} for s = 1/2
        let g = build_grid(16, 16, PI, PI).unwrap();
        let amp = 1e-12;
        let u = Field::from_fn(&g, |x, y| Complex64::new(0.0, x + y).exp() * amp);
        let params = ModelParams::new(0.5, 3.0);
        let dt = 0.3;
        let v = step(&u, dt, &params, Scheme::Strang).unwrap();
        let expected_phase = Complex64::new(0.0, -2.0 * dt).exp();
        let mut exact = u.clone();
        exact.scale(expected_phase);
        assert!(sup_diff(&v, &exact) / amp < 1e-10);
    }

    #[test]
    fn mass_exact_per_step_and_long_run() {
        let g = build_grid(48, 64, 8.0, 12.0).unwrap();
        let params = ModelParams::new(0.75, 3.0);
        let mut u = gaussian_seed(&g);
        let m0 = mass(&u).unwrap();
        u = step(&u, 0.01, &params, Scheme::Strang).unwrap();
        assert!((mass(&u).unwrap() - m0).abs() / m0 < 1e-12);
        for _ in 0..1000 {
            u = step(&u, 0.01, &params, Scheme::Strang).unwrap();
        }
        assert!((mass(&u).unwrap() - m0).abs() / m0 < 1e-10);
    }

    #[test]
    fn strang_self_convergence_order() {
        let g = build_grid(48, 64, 8.0, 12.0).unwrap();
        let params = ModelParams::new(0.75, 3.0);
        let u0 = gaussian_seed(&g);
        let t_final = 0.5;
        let run = |dt: f64| {
            let mut u = u0.clone();
            let n = (t_final / dt).round() as usize;
            for _ in 0..n {
                u = step(&u, dt, &params, Scheme::Strang).unwrap();
            }
            u
        };
        let (a, b, c) = (run(0.05), run(0.025), run(0.0125));
        let e1 = sup_diff(&a, &b);
        let e2 = sup_diff(&b, &c);
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order} (e1 = {e1:.3e}, e2 = {e2:.3e})");
    }

    #[test]
    fn lie_is_first_order() {
        let g = build_grid(48, 64, 8.0, 12.0).unwrap();
        let params = ModelParams::new(0.75, 3.0);
        let u0 = gaussian_seed(&g);
        let run = |dt: f64| {
            let mut u = u0.clone();
            for _ in 0..(0.5 / dt).round() as usize {
                u = step(&u, dt, &params, Scheme::Lie).unwrap();
            }
            u
        };
        let order = (sup_diff(&run(0.05), &run(0.025)) / sup_diff(&run(0.025), &run(0.0125)))
            .log2();
        assert!((0.8..1.5).contains(&order), "observed order {order}");
    }

    #[test]
    fn energy_drift_small_gaussian() {
        let g = build_grid(48, 64, 8.0, 12.0).unwrap();
        let params = ModelParams::new(0.75, 3.0);
        let mut u0 = gaussian_seed(&g);
        u0.scale(Complex64::new(0.1, 0.0));
        let traj = evolve(&u0, 1.0, 0.01, &params).unwrap();
        assert!(traj.aborted_at.is_none());
        let e0 = traj.diagnostics[0].energy;
        for d in &traj.diagnostics {
            assert!((d.energy - e0).abs() < 1e-4, "drift {} at t = {}", d.energy - e0, d.t);
            // Q-E consistency through energy conservation
            let s = params.s;
            let p = params.p;
            let predicted =
                2.0 * s * e0 - ((s + 1.0) * (p - 2.0) - 4.0 * s) / (2.0 * p) * d.lp.powf(p);
            assert!((d.q - predicted).abs() < 1e-4, "Q drift {} at t = {}", d.q - predicted, d.t);
        }
        // mass drift invariant of the trajectory
        let m0 = traj.diagnostics[0].mass;
        for d in &traj.diagnostics {
            assert!((d.mass - m0).abs() / m0 <= 1e-8);
        }
    }

    #[test]
    fn standing_wave_profile_is_stationary() {
        // u0 = phi evolves as e^{i alpha t} phi: |u(t)| matches |phi|
        let g = build_grid(128, 256, 10.0, 24.0).unwrap();
        let params = ModelParams::new(0.75, 3.0);
        let r = solve_fixed_alpha(&params, &g, None).unwrap();
        let traj = evolve_with(&r.field, 1.0, 0.005, &params, Scheme::Strang, 100).unwrap();
        assert!(traj.aborted_at.is_none());
        let (_, u1) = traj.snapshots.last().unwrap();
        let sup = u1
            .values
            .iter()
            .zip(&r.field.values)
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-3, "profile drift {sup}");
    }

    #[test]
    fn zero_initial_datum_stays_zero() {
        let g = build_grid(16, 16, 4.0, 4.0).unwrap();
        let z = Field::zeros(&g, Space::Physical);
        let traj = evolve(&z, 0.5, 0.05, &ModelParams::new(0.75, 3.0)).unwrap();
        for d in &traj.diagnostics {
            assert_eq!(d.mass, 0.0);
            assert_eq!(d.energy, 0.0);
        }
    }

    #[test]
    fn cutoff_shape_and_second_derivative_bound() {
        let g = build_grid(64, 64, 20.0, 20.0).unwrap();
        let r_cut = 4.0;
        let c = build_cutoff(r_cut, &g).unwrap();
        assert_eq!(c.theta_x.len(), 64);
        // quadratic zone and plateau
        assert!((theta_r(r_cut, r_cut / 2.0, 0) - r_cut * r_cut / 4.0).abs() < 1e-12);
        assert!((theta_r(r_cut, 3.0 * r_cut, 0) - 2.0 * r_cut * r_cut).abs() < 1e-12);
        // theta'' <= 2 on a fine mesh; derivative bounds |theta^{(k)}| <= C_k R^{2-k}
        let mut max2 = f64::NEG_INFINITY;
        let mut maxes = [0.0f64; 5];
        for i in 0..10_000 {
            let r = -3.0 * r_cut + 6.0 * r_cut * i as f64 / 9_999.0;
            max2 = max2.max(theta_r(r_cut, r, 2));
            for (k, m) in maxes.iter_mut().enumerate() {
                *m = m.max(theta_r(r_cut, r, k).abs() / r_cut.powi(2 - k as i32));
            }
        }
        assert!(max2 <= 2.0 + 1e-9, "max theta'' = {max2}");
        for (k, m) in maxes.iter().enumerate() {
            assert!(m.is_finite() && *m <= 130.0, "C_{k} = {m}");
        }
        // smoothness across the joints by finite differences of theta'''
        for joint in [r_cut, 2.0 * r_cut] {
            let h = 1e-7;
            assert!(
                (theta_r(r_cut, joint - h, 2) - theta_r(r_cut, joint + h, 2)).abs() < 1e-4,
                "theta'' jump at {joint}"
            );
        }
        // guards
        assert!(matches!(build_cutoff(0.5, &g), Err(Error::Cutoff(_))));
        assert!(matches!(build_cutoff(15.0, &g), Err(Error::Cutoff(_))));
    }

    #[test]
    fn virial_real_field_vanishes_and_matches_oracle() {
        let g = build_grid(96, 96, 12.0, 12.0).unwrap();
        let params = ModelParams::new(0.75, 4.0);
        let cutoff = build_cutoff(3.0, &g).unwrap();
        let real = gaussian_seed(&g);
        assert!(virial_m(&real, &cutoff, &params).unwrap().abs() < 1e-12);
        // u = e^{ix} Gaussian: analytic derivatives give a direct-sum oracle
        let u = Field::from_fn(&g, |x, y| {
            Complex64::new(0.0, x).exp() * (-0.5 * (x * x + y * y)).exp()
        });
        let m = virial_m(&u, &cutoff, &params).unwrap();
        let mut oracle = 0.0;
        for i in 0..g.nx {
            let x = g.x(i);
            for j in 0..g.ny {
                let y = g.y(j);
                let gauss = (-0.5 * (x * x + y * y)).exp();
                let phase = Complex64::new(0.0, x).exp();
                let uv = phase * gauss;
                let ux = phase * gauss * Complex64::new(-x, 1.0);
                let uy = phase * (-y * gauss);
                let grad = params.s * theta_r(cutoff.r, x, 1) * ux
                    + theta_r(cutoff.r, y, 1) * uy;
                oracle += (uv.conj() * grad).im;
            }
        }
        oracle *= 2.0 * g.cell();
        assert!((m - oracle).abs() < 1e-8 * oracle.abs().max(1.0), "{m} vs {oracle}");
    }

    #[test]
    fn virial_derivative_standing_wave_and_guards() {
        let g = build_grid(128, 256, 10.0, 24.0).unwrap();
        let params = ModelParams::new(0.75, 3.0);
        let r = solve_fixed_alpha(&params, &g, None).unwrap();
        let cutoff = build_cutoff(2.5, &g).unwrap();
        let traj = evolve_with(&r.field, 0.2, 0.01, &params, Scheme::Strang, 5).unwrap();
        let rep = virial_derivative_check(&traj, &cutoff, &params).unwrap();
        // stationary modulus: dM/dt ~ 0, limited by how well the discrete
        // profile satisfies the stationary equation (not by the differencing)
        for (t, d) in rep.times.iter().zip(&rep.dmdt) {
            assert!(d.abs() < 1e-2, "dM/dt = {d} at t = {t}");
        }
        assert!(rep.margin > 0.0, "margin = {}", rep.margin);
        // fewer than 3 snapshots rejected
        let short = evolve_with(&r.field, 0.02, 0.01, &params, Scheme::Strang, 0).unwrap();
        assert!(virial_derivative_check(&short, &cutoff, &params).is_err());
    }

    #[test]
    fn virial_linear_regime_margin() {
        let g = build_grid(48, 64, 8.0, 12.0).unwrap();
        let params = ModelParams::new(0.75, 4.0);
        let mut u0 = gaussian_seed(&g);
        u0.scale(Complex64::new(0.05, 0.0));
        let cutoff = build_cutoff(2.0, &g).unwrap();
        let traj = evolve_with(&u0, 0.5, 0.01, &params, Scheme::Strang, 10).unwrap();
        let rep = virial_derivative_check(&traj, &cutoff, &params).unwrap();
        assert!(rep.margin > 0.0);
        // in the near-linear regime the bound is dominated by the 8Q term
        for (k, t) in rep.times.iter().enumerate() {
            let d = &traj.diagnostics[traj.times.iter().position(|x| x == t).unwrap()];
            assert!(8.0 * d.q > 0.5 * rep.bound[k], "Q term not dominant at t = {t}");
        }
    }

    #[test]
    fn classify_tiny_gaussian_global() {
        let g = build_grid(48, 64, 8.0, 12.0).unwrap();
        let params = ModelParams::new(0.75, 5.0);
        let mut u0 = gaussian_seed(&g);
        u0.scale(Complex64::new(1e-3, 0.0));
        let v = classify_blowup(&u0, &params, 1.0).unwrap();
        assert_eq!(v.classification, BlowupClass::GlobalSuspected);
        assert!(v.q_max > 0.0);
        assert!(v.hdot_growth < 1.5);
    }

    #[test]
    fn classify_negative_energy_blowup() {
        let g = build_grid(128, 512, 10.0, 20.0).unwrap();
        let params = ModelParams::new(0.75, 5.0);
        let r = solve_fixed_alpha(&params, &g, None).unwrap();
        let mut u0 = r.field.clone();
        u0.scale(Complex64::new(1.5, 0.0));
        let e0 = energy(&u0, &params).unwrap();
        assert!(e0 < 0.0);
        let v = classify_blowup(&u0, &params, 2.0).unwrap();
        assert_eq!(v.classification, BlowupClass::BlowupSuspected);
        // Q(u(t)) <= 2s E(u(t)) when E < 0 (energy conservation)
        assert!(v.q_max <= 2.0 * params.s * e0 + 1e-6, "q_max = {}", v.q_max);
    }

    #[test]
    fn classify_regime_guard() {
        let g = build_grid(32, 32, 6.0, 6.0).unwrap();
        let u0 = gaussian_seed(&g);
        // s <= 1/2 rejected
        assert!(matches!(
            classify_blowup(&u0, &ModelParams::new(0.5, 3.0), 1.0),
            Err(Error::RegimeMismatch(_))
        ));
        // critical exponent needs E < 0
        let params = ModelParams::new(0.75, 2.0 * (3.0 * 0.75 + 1.0) / 1.75);
        let mut tiny = u0.clone();
        tiny.scale(Complex64::new(1e-3, 0.0));
        assert!(matches!(
            classify_blowup(&tiny, &params, 1.0),
            Err(Error::RegimeMismatch(_))
        ));
    }

    #[test]
    fn instability_scaling_and_blowup() {
        let g = build_grid(128, 256, 10.0, 24.0).unwrap();
        let params = ModelParams::new(0.75, 4.0);
        let r = solve_fixed_alpha(&params, &g, None).unwrap();
        assert!(matches!(
            instability_data(&r.field, 1.0, &params),
            Err(Error::Params(_))
        ));
        let perturbed = instability_data(&r.field, 1.05, &params).unwrap();
        assert!(energy(&perturbed, &params).unwrap() < energy(&r.field, &params).unwrap());
        assert!(hdot(&perturbed, params.s).unwrap() > hdot(&r.field, params.s).unwrap());
        let lpp = lp_power(&perturbed, params.p).unwrap();
        assert!(lpp > 0.0);
        let v = classify_blowup(&perturbed, &params, 6.0).unwrap();
        assert_eq!(v.classification, BlowupClass::BlowupSuspected, "{:?}", v);
    }
}
