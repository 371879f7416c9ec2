//! Implicit-Euler gradient flow.
//!
//! One step maps `u` to the minimiser of `w ↦ E(w) + ‖w - u‖²/(2τ)` in the
//! weighted `L²` norm. Purely quadratic forms are solved with preconditioned
//! conjugate gradients on `(M + τL) w = M u`. Everything else goes through
//! cyclic coordinate ascent on the dual, one variable per edge term, which
//! handles the nonsmooth penalties exactly through their scalar proximal maps
//! and certifies the result with the duality gap.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{ExtendedEnergy, FormInstance};
use crate::measure::Field;
use crate::rng::stream;
use crate::sampling::FieldSampler;

/// Number of random probes checked after every step.
pub const N_PROBES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub tau: f64,
    pub n_steps: usize,
    /// Bound on the suboptimality of each proximal step.
    pub inner_tol: f64,
    /// Sweep (or CG iteration) budget per step.
    pub max_inner_iters: usize,
    /// Seeds the probe sets.
    pub seed: u64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            tau: 0.01,
            n_steps: 100,
            inner_tol: 1e-9,
            max_inner_iters: 200_000,
            seed: 0,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadConfig(m));
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return bad(format!("tau = {} must be finite and > 0", self.tau));
        }
        if self.n_steps < 1 {
            return bad("n_steps must be at least 1".into());
        }
        if !(self.inner_tol.is_finite() && self.inner_tol > 0.0) {
            return bad(format!("inner_tol = {} must be finite and > 0", self.inner_tol));
        }
        if self.max_inner_iters < 1 {
            return bad("max_inner_iters must be at least 1".into());
        }
        Ok(())
    }

    fn prox_options(&self, step: usize) -> ProxOptions {
        ProxOptions {
            inner_tol: self.inner_tol,
            max_inner_iters: self.max_inner_iters,
            probe_seed: stream(self.seed, &format!("probe/{step}")).gen(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProxOptions {
    pub inner_tol: f64,
    pub max_inner_iters: usize,
    pub probe_seed: u64,
}

impl Default for ProxOptions {
    fn default() -> Self {
        let c = FlowConfig::default();
        Self {
            inner_tol: c.inner_tol,
            max_inner_iters: c.max_inner_iters,
            probe_seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProxOutcome {
    pub field: Field,
    /// Certified upper bound on `objective(field) - min objective`.
    pub residual: f64,
    /// CG iterations or dual sweeps used.
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct FlowTrace {
    pub tau: f64,
    /// `states[0]` is the initial datum.
    pub states: Vec<Field>,
    pub energies: Vec<ExtendedEnergy>,
    /// `residuals[k]` certifies the step producing `states[k + 1]`.
    pub residuals: Vec<f64>,
}

fn objective(e: &FormInstance, w: &[f64], u: &[f64], tau: f64) -> f64 {
    let m = e.space().weights();
    let dist: f64 = (0..u.len()).map(|i| m[i] * (w[i] - u[i]) * (w[i] - u[i])).sum();
    e.energy(w) + dist / (2.0 * tau)
}

/// `(M + τL) w = M u` by Jacobi-preconditioned CG, started at `u`.
fn solve_quadratic(e: &FormInstance, u: &[f64], tau: f64, max_iters: usize) -> (Vec<f64>, f64, usize) {
    let m = e.space().weights();
    let n = u.len();
    let coeffs: Vec<(usize, usize, f64)> = e
        .terms()
        .iter()
        .map(|t| (t.head, t.tail, t.penalty.quadratic_coefficient().unwrap()))
        .collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            out[i] = m[i] * x[i];
        }
        for &(i, j, c) in &coeffs {
            let flux = tau * c * (x[i] - x[j]);
            out[i] += flux;
            out[j] -= flux;
        }
    };
    let mut diag: Vec<f64> = m.to_vec();
    for &(i, j, c) in &coeffs {
        diag[i] += tau * c;
        diag[j] += tau * c;
    }
    let b: Vec<f64> = (0..n).map(|i| m[i] * u[i]).collect();
    let mut x = u.to_vec();
    let mut ax = vec![0.0; n];
    let residual = |x: &[f64], ax: &mut [f64]| -> Vec<f64> {
        apply(x, ax);
        (0..n).map(|i| b[i] - ax[i]).collect()
    };
    let mut r = residual(&x, &mut ax);
    let certificate = |r: &[f64]| (0..n).map(|i| r[i] * r[i] / m[i]).sum::<f64>() / (2.0 * tau);
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = 1e-15 * b_norm.max(f64::MIN_POSITIVE);
    let mut iters = 0;
    // restarts recompute the true residual to shed accumulated rounding
    while iters < max_iters {
        let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm(&r) <= target {
            break;
        }
        let mut z: Vec<f64> = (0..n).map(|i| r[i] / diag[i]).collect();
        let mut p = z.clone();
        let mut rz: f64 = (0..n).map(|i| r[i] * z[i]).sum();
        let mut ap = vec![0.0; n];
        let before = norm(&r);
        for _ in 0..(2 * n + 10) {
            if iters >= max_iters || norm(&r) <= target {
                break;
            }
            iters += 1;
            apply(&p, &mut ap);
            let pap: f64 = (0..n).map(|i| p[i] * ap[i]).sum();
            if !(pap > 0.0) {
                break;
            }
            let a = rz / pap;
            for i in 0..n {
                x[i] += a * p[i];
                r[i] -= a * ap[i];
                z[i] = r[i] / diag[i];
            }
            let rz_new: f64 = (0..n).map(|i| r[i] * z[i]).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        r = residual(&x, &mut ax);
        if norm(&r) >= 0.5 * before {
            // stagnated at rounding level
            break;
        }
    }
    let cert = certificate(&r);
    (x, cert, iters)
}

/// Cyclic coordinate ascent on the dual; returns the primal point, the
/// duality gap and the number of sweeps.
fn solve_dual(e: &FormInstance, u: &[f64], tau: f64, max_sweeps: usize) -> (Vec<f64>, f64, usize) {
    let m = e.space().weights();
    let terms = e.terms();
    let mut w = u.to_vec();
    let mut p = vec![0.0; terms.len()];
    let kappa: Vec<f64> = terms
        .iter()
        .map(|t| tau * (1.0 / m[t.head] + 1.0 / m[t.tail]))
        .collect();
    let scale = u.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let gap = |w: &[f64], p: &[f64]| -> f64 {
        terms
            .iter()
            .zip(p)
            .map(|(t, &q)| t.penalty.fenchel_young_gap(w[t.head] - w[t.tail], q))
            .sum::<f64>()
            .max(0.0)
    };
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut moved = 0.0f64;
        for (k, t) in terms.iter().enumerate() {
            let z = w[t.head] - w[t.tail] + kappa[k] * p[k];
            let d = t.penalty.prox(z, kappa[k]);
            let q = t.penalty.clamp_dual((z - d) / kappa[k]);
            let dq = q - p[k];
            if dq != 0.0 {
                let (sh, st) = (tau * dq / m[t.head], tau * dq / m[t.tail]);
                w[t.head] -= sh;
                w[t.tail] += st;
                moved = moved.max(sh.abs()).max(st.abs());
                p[k] = q;
            }
        }
        if moved <= 1e-15 * scale {
            break;
        }
    }
    let g = gap(&w, &p);
    (w, g, sweeps)
}

/// One implicit-Euler step from `u`.
pub fn prox_step(e: &FormInstance, u: &Field, tau: f64, opts: &ProxOptions) -> Result<ProxOutcome> {
    if !u.space().same_as(e.space()) {
        return Err(Error::SpaceMismatch);
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::BadConfig(format!("tau = {tau} must be finite and > 0")));
    }
    let uv = u.values();
    let (w, residual, iterations) = if e.terms().is_empty() {
        (uv.to_vec(), 0.0, 0)
    } else if e.is_quadratic() {
        solve_quadratic(e, uv, tau, opts.max_inner_iters)
    } else {
        solve_dual(e, uv, tau, opts.max_inner_iters)
    };
    let fail = || Error::NoConvergence {
        iters: iterations,
        gap: residual,
    };
    if !(residual <= opts.inner_tol) || w.iter().any(|v| !v.is_finite()) {
        return Err(fail());
    }

    let best = objective(e, &w, uv, tau);
    let mut rng = stream(opts.probe_seed, "probes");
    let sampler = FieldSampler {
        amplitude: 1.0 + u.linf_norm(),
        ..FieldSampler::default()
    };
    let mut probes = vec![uv.to_vec()];
    for k in 0..N_PROBES {
        let probe: Vec<f64> = if k % 2 == 0 {
            sampler.sample(e.space(), &mut rng).into_values()
        } else {
            let eps = 10f64.powf(rng.gen_range(-6.0..0.0));
            w.iter().map(|v| v + eps * rng.gen_range(-1.0..=1.0)).collect()
        };
        probes.push(probe);
    }
    if probes.iter().any(|pr| best > objective(e, pr, uv, tau) + opts.inner_tol) {
        return Err(fail());
    }
    Ok(ProxOutcome {
        field: Field::new(e.space(), w)?,
        residual,
        iterations,
    })
}

pub fn evolve(e: &FormInstance, u0: &Field, cfg: &FlowConfig) -> Result<FlowTrace> {
    cfg.validate()?;
    if !u0.space().same_as(e.space()) {
        return Err(Error::SpaceMismatch);
    }
    let mut trace = FlowTrace {
        tau: cfg.tau,
        states: vec![u0.clone()],
        energies: vec![e.eval(u0)?],
        residuals: Vec::with_capacity(cfg.n_steps),
    };
    for step in 1..=cfg.n_steps {
        let prev = trace.states.last().unwrap();
        let out = prox_step(e, prev, cfg.tau, &cfg.prox_options(step)).map_err(|err| Error::StepFailed {
            step,
            source: Box::new(err),
        })?;
        trace.energies.push(e.eval(&out.field)?);
        trace.states.push(out.field);
        trace.residuals.push(out.residual);
    }
    Ok(trace)
}
