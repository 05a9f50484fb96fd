//! Dormand–Prince 5(4) integrator for complex-valued linear and nonlinear
//! systems.
//!
//! Step control is the PI controller of Hairer & Wanner (DOPRI5): on an
//! accepted step the new size is `h · 0.9 · err^-0.17 · err_prev^0.04`,
//! clamped to `[0.2h, 10h]`; a rejected step shrinks by
//! `max(0.2, 0.9 · err^-0.2)` and may not grow on the next attempt. The
//! error is the RMS of `|e_i| / (abs_tol + rel_tol · max(|y_i|, |y_new_i|))`.
//! Output times are hit exactly by truncating the last step before each.

use super::{LinalgError, C64};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const PI_ALPHA: f64 = 0.17;
const PI_BETA: f64 = 0.04;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// First trial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_step: f64,
    /// Steps shorter than this (relative to `max(1, |t|)`) abort the run.
    pub min_step: f64,
    pub max_steps: usize,
    /// Debug fallback: fixed step of this size, no error control.
    pub fixed_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            initial_step: None,
            max_step: f64::INFINITY,
            min_step: 1e-14,
            max_steps: 5_000_000,
            fixed_step: None,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), LinalgError> {
        if self.fixed_step.is_some_and(|h| !(h > 0.0 && h.is_finite())) {
            return Err(LinalgError::InvalidInput("fixed step must be positive".into()));
        }
        if self.fixed_step.is_none() && !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(LinalgError::InvalidInput("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub last_step: f64,
}

/// Reusable integrator; holds only its options.
#[derive(Clone, Debug, Default)]
pub struct OdeIntegrator {
    pub options: OdeOptions,
}

struct Stages {
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
    y_new: Vec<C64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            k: std::array::from_fn(|_| z.clone()),
            tmp: z.clone(),
            y_new: z,
        }
    }
}

fn lincomb(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o = y[i] + acc * h;
    }
}

impl OdeIntegrator {
    pub fn new(options: OdeOptions) -> Self {
        Self { options }
    }

    /// Integrates `dy/dt = deriv(t, y)` from `t = 0` to `t_end`.
    pub fn integrate<F>(&self, deriv: F, y0: &[C64], t_end: f64) -> Result<(Vec<C64>, OdeStats), LinalgError>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        if !(t_end >= 0.0) {
            return Err(LinalgError::InvalidInput(format!("t_end = {t_end} must be >= 0")));
        }
        let (mut outs, stats) =
            self.solve(deriv, y0, 0.0, &[t_end], |_, _| Ok::<(), LinalgError>(()))?;
        Ok((outs.pop().expect("one output requested"), stats))
    }

    /// Integrates from `t0` through every time in `t_out` (ascending, each
    /// `≥ t0`) and returns the state at each of them.
    ///
    /// `on_step` runs after every accepted step and may modify the state in
    /// place (e.g. re-symmetrize) or abort with an error.
    pub fn solve<F, O, E>(
        &self,
        mut deriv: F,
        y0: &[C64],
        t0: f64,
        t_out: &[f64],
        mut on_step: O,
    ) -> Result<(Vec<Vec<C64>>, OdeStats), E>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        O: FnMut(f64, &mut [C64]) -> Result<(), E>,
        E: From<LinalgError>,
    {
        self.options.validate()?;
        if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.first().is_some_and(|&t| t < t0) {
            return Err(LinalgError::InvalidInput("output times must be ascending and >= t0".into()).into());
        }
        let n = y0.len();
        let mut st = Stages::new(n);
        let mut y = y0.to_vec();
        let mut t = t0;
        let mut stats = OdeStats::default();
        let mut outputs = Vec::with_capacity(t_out.len());

        deriv(t, &y, &mut st.k[0]);
        stats.evaluations += 1;

        let mut h = match (self.options.fixed_step, self.options.initial_step) {
            (Some(h), _) => h,
            (None, Some(h)) => h,
            (None, None) => self.initial_step(&mut deriv, t, &y, &mut st, &mut stats),
        }
        .min(self.options.max_step);
        let mut err_prev = 1e-4_f64;
        let mut just_rejected = false;

        for &target in t_out {
            while t < target {
                if stats.accepted + stats.rejected >= self.options.max_steps {
                    return Err(LinalgError::TooManySteps {
                        t,
                        max_steps: self.options.max_steps,
                    }
                    .into());
                }
                let remaining = target - t;
                let h_try = h.min(remaining);
                let last = h_try >= remaining;
                self.stages(&mut deriv, t, &y, h_try, &mut st);
                stats.evaluations += 6;

                let err = match self.options.fixed_step {
                    Some(_) => 0.0,
                    None => self.error_norm(&y, &st, h_try),
                };
                if !err.is_finite() {
                    return Err(LinalgError::NonFinite { t }.into());
                }

                if err <= 1.0 {
                    t = if last { target } else { t + h_try };
                    std::mem::swap(&mut y, &mut st.y_new);
                    on_step(t, &mut y)?;
                    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                        return Err(LinalgError::NonFinite { t }.into());
                    }
                    // FSAL: k7 is f(t+h, y_new) unless the observer changed y.
                    deriv(t, &y, &mut st.k[0]);
                    stats.evaluations += 1;
                    stats.accepted += 1;
                    stats.last_step = h_try;
                    if self.options.fixed_step.is_none() {
                        let mut factor = SAFETY * err.max(1e-10).powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
                        factor = factor.clamp(MIN_FACTOR, MAX_FACTOR);
                        if just_rejected {
                            factor = factor.min(1.0);
                        }
                        // Keep the controller's step when the truncation was only
                        // to land on an output time.
                        let base = if last { h.max(h_try) } else { h_try };
                        h = (base * factor).min(self.options.max_step);
                        err_prev = err.max(1e-4);
                    }
                    just_rejected = false;
                } else {
                    stats.rejected += 1;
                    let factor = (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
                    h = h_try * factor;
                    just_rejected = true;
                    if h < self.options.min_step * t.abs().max(1.0) {
                        return Err(LinalgError::StepUnderflow { t, h }.into());
                    }
                }
            }
            outputs.push(y.clone());
        }
        Ok((outputs, stats))
    }

    fn stages<F>(&self, deriv: &mut F, t: f64, y: &[C64], h: f64, st: &mut Stages)
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let Stages { k, tmp, y_new } = st;
        let [k1, k2, k3, k4, k5, k6, k7] = k;
        lincomb(tmp, y, h, &[(A21, k1)]);
        deriv(t + C2 * h, tmp, k2);
        lincomb(tmp, y, h, &[(A31, k1), (A32, k2)]);
        deriv(t + C3 * h, tmp, k3);
        lincomb(tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        deriv(t + C4 * h, tmp, k4);
        lincomb(tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        deriv(t + C5 * h, tmp, k5);
        lincomb(tmp, y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
        deriv(t + h, tmp, k6);
        lincomb(y_new, y, h, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
        deriv(t + h, y_new, k7);
    }

    fn error_norm(&self, y: &[C64], st: &Stages, h: f64) -> f64 {
        let k = &st.k;
        let n = y.len().max(1);
        let mut acc = 0.0;
        for i in 0..y.len() {
            let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * h;
            let sc = self.options.abs_tol + self.options.rel_tol * y[i].norm().max(st.y_new[i].norm());
            acc += (e.norm() / sc).powi(2);
        }
        (acc / n as f64).sqrt()
    }

    /// Starting step from Hairer, Nørsett & Wanner, Sect. II.4.
    fn initial_step<F>(&self, deriv: &mut F, t: f64, y: &[C64], st: &mut Stages, stats: &mut OdeStats) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let o = &self.options;
        let scaled = |v: &[C64]| -> f64 {
            let n = v.len().max(1) as f64;
            (v.iter()
                .zip(y)
                .map(|(a, yi)| (a.norm() / (o.abs_tol + o.rel_tol * yi.norm())).powi(2))
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let d0 = scaled(y);
        let d1 = scaled(&st.k[0]);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        lincomb(&mut st.tmp, y, h0, &[(1.0, &st.k[0])]);
        deriv(t + h0, &st.tmp, &mut st.k[1]);
        stats.evaluations += 1;
        let diff: Vec<C64> = st.k[1].iter().zip(&st.k[0]).map(|(a, b)| a - b).collect();
        let d2 = scaled(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }
}
