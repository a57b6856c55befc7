use super::state_space::balanced_realization;
use super::{StateSpace, TransferFunction};
use crate::{Error, Result, Scalar};

/// States larger than this in magnitude mark a response as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e9;

/// Largest `h·ρ` (step times root-radius bound) allowed for one RK4 substep.
const MAX_STEP_RADIUS: f64 = 0.1;

/// Sampled unit-step response on the grid `t[k] = k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResponse<T> {
    pub dt: T,
    pub horizon: T,
    pub t: Vec<T>,
    pub y: Vec<T>,
    /// `e[k] = 1 − y[k]`.
    pub e: Vec<T>,
    /// Set when the state blew past [`DIVERGENCE_LIMIT`]; samples after the
    /// blow-up repeat the last finite output.
    pub diverged: bool,
}

impl<T: Scalar> StepResponse<T> {
    pub fn from_output(dt: T, horizon: T, y: Vec<T>, diverged: bool) -> Self {
        let t = (0..y.len()).map(|k| T::from_usize(k).unwrap() * dt).collect();
        let e = y.iter().map(|&y| T::one() - y).collect();
        Self { dt, horizon, t, y, e, diverged }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn final_value(&self) -> T {
        self.y[self.y.len() - 1]
    }
}

/// `floor(horizon/dt) + 1`, tolerant of representation error in the ratio.
pub fn sample_count<T: Scalar>(dt: T, horizon: T) -> Result<usize> {
    let bad = || Error::InvalidTimeGrid { dt: dt.to_f64_lossy(), horizon: horizon.to_f64_lossy() };
    if !(dt > T::zero()) || !dt.is_finite() || !horizon.is_finite() || horizon < dt {
        return Err(bad());
    }
    let ratio = (horizon / dt).to_f64_lossy();
    Ok((ratio + 1e-9).floor() as usize + 1)
}

/// Exact RK4 map of a linear system over one sample period with the input
/// held constant: `x ← Φx + Γu`.
///
/// For linear dynamics the classical RK4 stages collapse to
/// `Φ = I + hA + (hA)²/2 + (hA)³/6 + (hA)⁴/24` and
/// `Γ = h(I + hA/2 + (hA)²/6 + (hA)³/24)B`. The sample period is split into
/// `substeps` equal RK4 steps so that `h·ρ ≤ 0.1`, where `ρ` bounds the
/// pole magnitudes; the substeps are composed once up front.
#[derive(Debug, Clone)]
pub struct Rk4Propagator<T> {
    n: usize,
    phi: Vec<T>,
    gamma: Vec<T>,
    c: Vec<T>,
    d: T,
    substeps: usize,
}

impl<T: Scalar> Rk4Propagator<T> {
    pub fn new(ss: &StateSpace<T>, dt: T, pole_radius: T) -> Self {
        let n = ss.order();
        let substeps = (pole_radius * dt / T::lit(MAX_STEP_RADIUS)).ceil().to_f64_lossy();
        let substeps = if substeps.is_finite() && substeps >= 1.0 { substeps as usize } else { 1 };
        let h = dt / T::from_usize(substeps).unwrap();

        let ha: Vec<T> = ss.a_matrix().iter().map(|&a| a * h).collect();
        let ident = identity(n);
        let ha2 = matmul(&ha, &ha, n);
        let ha3 = matmul(&ha2, &ha, n);
        let ha4 = matmul(&ha3, &ha, n);
        let (half, sixth, tw4) = (T::lit(0.5), T::lit(1.0 / 6.0), T::lit(1.0 / 24.0));
        let step_phi: Vec<T> =
            (0..n * n).map(|k| ident[k] + ha[k] + ha2[k] * half + ha3[k] * sixth + ha4[k] * tw4).collect();
        let step_gamma_mat: Vec<T> =
            (0..n * n).map(|k| (ident[k] + ha[k] * half + ha2[k] * sixth + ha3[k] * tw4) * h).collect();
        let step_gamma = matvec(&step_gamma_mat, ss.b(), n);

        let mut phi = ident;
        let mut gamma = vec![T::zero(); n];
        for _ in 0..substeps {
            phi = matmul(&step_phi, &phi, n);
            gamma = matvec(&step_phi, &gamma, n);
            for (g, &s) in gamma.iter_mut().zip(&step_gamma) {
                *g = *g + s;
            }
        }
        Self { n, phi, gamma, c: ss.c().to_vec(), d: ss.d(), substeps }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn output(&self, x: &[T], u: T) -> T {
        self.c.iter().zip(x).map(|(&c, &x)| c * x).sum::<T>() + self.d * u
    }

    pub fn feedthrough(&self) -> T {
        self.d
    }

    /// Advances `x` by one sample period; `scratch` must have the state length.
    pub fn advance(&self, x: &mut [T], u: T, scratch: &mut [T]) {
        let n = self.n;
        if n == 0 {
            return;
        }
        for ((s, row), &g) in scratch.iter_mut().zip(self.phi.chunks_exact(n)).zip(&self.gamma) {
            *s = row.iter().zip(x.iter()).map(|(&p, &x)| p * x).sum::<T>() + g * u;
        }
        x.copy_from_slice(scratch);
    }
}

pub(crate) fn state_diverged<T: Scalar>(x: &[T]) -> bool {
    let limit = T::lit(DIVERGENCE_LIMIT);
    x.iter().any(|v| !v.is_finite() || v.abs() > limit)
}

/// Unit-step response of a proper transfer function from rest.
pub fn step_response<T: Scalar>(tf: &TransferFunction<T>, dt: T, horizon: T) -> Result<StepResponse<T>> {
    let count = sample_count(dt, horizon)?;
    let (ss, radius) = balanced_realization(tf)?;
    let prop = Rk4Propagator::new(&ss, dt, radius);

    let n = prop.order();
    let mut x = vec![T::zero(); n];
    let mut scratch = vec![T::zero(); n];
    let mut y = Vec::with_capacity(count);
    let mut diverged = false;
    for _ in 0..count {
        if diverged {
            let last = y.last().copied().unwrap_or_else(T::zero);
            y.push(last);
            continue;
        }
        let out = prop.output(&x, T::one());
        if !out.is_finite() || out.abs() > T::lit(DIVERGENCE_LIMIT) {
            diverged = true;
            let last = y.last().copied().unwrap_or_else(T::zero);
            y.push(last);
            continue;
        }
        y.push(out);
        prop.advance(&mut x, T::one(), &mut scratch);
        diverged = state_diverged(&x);
    }
    Ok(StepResponse::from_output(dt, horizon, y, diverged))
}

fn identity<T: Scalar>(n: usize) -> Vec<T> {
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = T::one();
    }
    m
}

fn matmul<T: Scalar>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    out
}

fn matvec<T: Scalar>(a: &[T], v: &[T], n: usize) -> Vec<T> {
    (0..n).map(|i| a[i * n..(i + 1) * n].iter().zip(v).map(|(&a, &v)| a * v).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{closed_loop, pid_tf, to_state_space};
    use crate::tuners::PidGains;

    fn tf(n: &[f64], d: &[f64]) -> TransferFunction<f64> {
        TransferFunction::from_coeffs(n, d).unwrap()
    }

    /// Textbook four-stage RK4 on the unscaled realization, stepped at `h`.
    fn stagewise_rk4(ss: &StateSpace<f64>, h: f64, steps_per_sample: usize, samples: usize) -> Vec<f64> {
        let n = ss.order();
        let mut x = vec![0.0; n];
        let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut tmp = vec![0.0; n];
        let mut y = Vec::new();
        for _ in 0..samples {
            y.push(ss.output(&x, 1.0));
            for _ in 0..steps_per_sample {
                ss.derivative(&x, 1.0, &mut k1);
                for i in 0..n {
                    tmp[i] = x[i] + 0.5 * h * k1[i];
                }
                ss.derivative(&tmp, 1.0, &mut k2);
                for i in 0..n {
                    tmp[i] = x[i] + 0.5 * h * k2[i];
                }
                ss.derivative(&tmp, 1.0, &mut k3);
                for i in 0..n {
                    tmp[i] = x[i] + h * k3[i];
                }
                ss.derivative(&tmp, 1.0, &mut k4);
                for i in 0..n {
                    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        y
    }

    #[test]
    fn first_order_lag_matches_analytic() {
        let r = step_response(&tf(&[1.0], &[1.0, 1.0]), 0.01, 15.0).unwrap();
        assert_eq!(r.len(), 1501);
        assert_eq!(r.y[0], 0.0);
        assert!((r.y[100] - 0.63212).abs() < 1e-4);
        let worst = r.t.iter().zip(&r.y).map(|(&t, &y)| (y - (1.0 - (-t).exp())).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-6, "{worst}");
        assert!(!r.diverged);
    }

    #[test]
    fn error_is_exact_complement() {
        let r = step_response(&tf(&[1.0, 3.0], &[1.0, 0.7, 2.0]), 0.01, 5.0).unwrap();
        for (y, e) in r.y.iter().zip(&r.e) {
            assert_eq!(*e, 1.0 - *y);
            assert_eq!(*e + *y, 1.0);
        }
    }

    #[test]
    fn biproper_starts_at_feedthrough() {
        let r = step_response(&tf(&[1.0, 2.0], &[1.0, 1.0]), 0.01, 1.0).unwrap();
        assert_eq!(r.y[0], 1.0);
        // y = 2 − e^{−t}
        assert!((r.y[100] - (2.0 - (-1.0f64).exp())).abs() < 1e-8);
    }

    #[test]
    fn propagator_agrees_with_stagewise_rk4() {
        let plant = tf(&[1.0], &[1.0, 1.0]);
        let delay = tf(&[0.0954, -0.49, 1.0], &[0.0954, 0.49, 1.0]);
        let c = pid_tf(&PidGains::new(0.6, 1.2, 0.6)).unwrap();
        let t = closed_loop(&c, &plant, &delay).unwrap();
        let r = step_response(&t, 0.01, 15.0).unwrap();
        let ss = to_state_space(&t).unwrap();
        let (bal, radius) = balanced_realization(&t).unwrap();
        let m = Rk4Propagator::new(&bal, 0.01, radius).substeps();
        let reference = stagewise_rk4(&ss, 0.01 / m as f64, m, r.len());
        let worst = r.y.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn stiff_small_delay_loop_stays_accurate() {
        // Z-N gains at a 0.01 s delay put closed-loop poles near |s| ≈ 230.
        let tau: f64 = 0.01;
        let delay = tf(&[0.0954 * tau * tau, -0.49 * tau, 1.0], &[0.0954 * tau * tau, 0.49 * tau, 1.0]);
        let c = pid_tf(&PidGains::new(0.6, 120.0, 6000.0)).unwrap();
        let t = closed_loop(&c, &tf(&[1.0], &[1.0, 1.0]), &delay).unwrap();
        let coarse = step_response(&t, 0.01, 2.0).unwrap();
        let fine = step_response(&t, 0.001, 2.0).unwrap();
        assert!(!coarse.diverged);
        for k in 0..coarse.len() {
            assert!((coarse.y[k] - fine.y[10 * k]).abs() < 1e-6, "k={k}: {} vs {}", coarse.y[k], fine.y[10 * k]);
        }
    }

    #[test]
    fn unstable_loop_flagged_and_clamped() {
        let r = step_response(&tf(&[1.0], &[1.0, -5.0]), 0.01, 15.0).unwrap();
        assert!(r.diverged);
        assert!(r.y.iter().all(|y| y.is_finite()));
        let last = r.final_value();
        assert_eq!(r.y[r.len() - 2], last);
    }

    #[test]
    fn invalid_grid_rejected() {
        let t = tf(&[1.0], &[1.0, 1.0]);
        assert!(step_response(&t, 0.0, 1.0).is_err());
        assert!(step_response(&t, -0.1, 1.0).is_err());
        assert!(step_response(&t, 0.1, 0.05).is_err());
        assert!(step_response(&tf(&[1.0, 0.0, 0.0], &[1.0, 1.0]), 0.1, 1.0).is_err());
    }

    #[test]
    fn single_precision_path() {
        let t = TransferFunction::<f32>::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
        let r = step_response(&t, 0.01f32, 15.0).unwrap();
        assert_eq!(r.len(), 1501);
        assert!((r.y[100] - 0.632_12).abs() < 1e-4);
    }
}
