//! Classical limit: a single-wavenumber field mode velocity-coupled to the
//! oscillator chain continuum. Exact normal-mode solution, dispersion and
//! Rabi frequency, plus an independent fixed-step RK4 oracle.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SimError};

/// Parameters of the coupled pair: field mode (wavenumber k, speed c) and
/// chain frequency omega, coupled with strength epsilon through the time
/// derivatives.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalModeParams {
    pub omega: f64,
    pub wavenumber: f64,
    pub light_speed: f64,
    pub coupling: f64,
}

impl ClassicalModeParams {
    pub fn new(omega: f64, wavenumber: f64, light_speed: f64, coupling: f64) -> Result<Self> {
        if omega <= 0.0 || light_speed <= 0.0 || coupling < 0.0 {
            return Err(SimError::SingularInput(format!(
                "need omega > 0, c > 0, coupling >= 0; got {omega}, {light_speed}, {coupling}"
            )));
        }
        Ok(ClassicalModeParams {
            omega,
            wavenumber,
            light_speed,
            coupling,
        })
    }

    fn ck(&self) -> f64 {
        self.light_speed * self.wavenumber
    }
}

/// Normal-mode frequencies:
/// nu_pm^2 = ((w^2 + c^2k^2 + e^2) +- sqrt((w^2 + c^2k^2 + e^2)^2 - 4 c^2 w^2 k^2))/2.
pub fn dispersion(params: &ClassicalModeParams) -> (f64, f64) {
    let w2 = params.omega * params.omega;
    let ck2 = params.ck() * params.ck();
    let e2 = params.coupling * params.coupling;
    let sum = w2 + ck2 + e2;
    let disc = (sum * sum - 4.0 * w2 * ck2).max(0.0);
    let root = disc.sqrt();
    (((sum + root) / 2.0).sqrt(), ((sum - root) / 2.0).sqrt())
}

/// Classical Rabi frequency |nu_plus| - |nu_minus|.
pub fn rabi_frequency(params: &ClassicalModeParams) -> f64 {
    let (plus, minus) = dispersion(params);
    plus - minus
}

/// Prefactor machinery shared by the solution and its derivative.
struct NormalModeSplit {
    nu_plus: f64,
    nu_minus: f64,
    /// weight of the nu_minus branch in phi.
    p: f64,
    /// common psi amplitude -i e c w k / D.
    psi_amp: C64,
}

fn split(params: &ClassicalModeParams) -> Result<NormalModeSplit> {
    let (nu_plus, nu_minus) = dispersion(params);
    let w2 = params.omega * params.omega;
    let d = nu_plus * (w2 - nu_minus * nu_minus) - nu_minus * (w2 - nu_plus * nu_plus);
    if d.abs() < 1e-14 * (w2 + nu_plus * nu_plus) {
        return Err(SimError::DegenerateModes(format!(
            "nu+ = {nu_plus}, nu- = {nu_minus}: normal modes coincide"
        )));
    }
    Ok(NormalModeSplit {
        nu_plus,
        nu_minus,
        p: nu_plus * (w2 - nu_minus * nu_minus) / d,
        psi_amp: C64::new(0.0, -1.0)
            * (params.coupling * params.light_speed * params.omega * params.wavenumber / d),
    })
}

/// Closed-form normal-mode solution at zbar = 0 with phi(0) = 1, psi(0) = 0
/// on the positive-frequency (right-moving) branch:
/// phi = (1 - P) e^(-i nu+ tau) + P e^(-i nu- tau),
/// psi = -(i e c w k / D)(e^(-i nu+ tau) - e^(-i nu- tau)).
pub fn mode_solution(params: &ClassicalModeParams, tau: f64) -> Result<(C64, C64)> {
    let s = split(params)?;
    let plus = C64::from_polar(1.0, -s.nu_plus * tau);
    let minus = C64::from_polar(1.0, -s.nu_minus * tau);
    let phi = plus * (1.0 - s.p) + minus * s.p;
    let psi = s.psi_amp * (plus - minus);
    Ok((phi, psi))
}

/// Analytic time derivatives of the closed form.
pub fn mode_solution_derivative(params: &ClassicalModeParams, tau: f64) -> Result<(C64, C64)> {
    let s = split(params)?;
    let plus = C64::from_polar(1.0, -s.nu_plus * tau) * C64::new(0.0, -s.nu_plus);
    let minus = C64::from_polar(1.0, -s.nu_minus * tau) * C64::new(0.0, -s.nu_minus);
    let phi_dot = plus * (1.0 - s.p) + minus * s.p;
    let psi_dot = s.psi_amp * (plus - minus);
    Ok((phi_dot, psi_dot))
}

/// Conserved quadratic form of the coupled system,
/// |phi'|^2 + c^2k^2 |phi|^2 + |psi'|^2 + w^2 |psi|^2 (the velocity-coupling
/// cross terms cancel identically).
pub fn energy(params: &ClassicalModeParams, y: &[C64; 4]) -> f64 {
    let ck2 = params.ck() * params.ck();
    let w2 = params.omega * params.omega;
    y[1].norm_sqr() + ck2 * y[0].norm_sqr() + y[3].norm_sqr() + w2 * y[2].norm_sqr()
}

/// Numerically integrated trace of (phi, phi', psi, psi').
#[derive(Debug, Clone)]
pub struct ModeTrace {
    pub taus: Vec<f64>,
    pub phi: Vec<C64>,
    pub psi: Vec<C64>,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub rabi: f64,
    /// Max relative energy drift over the run.
    pub energy_drift: f64,
    /// Endpoint disagreement between the dt and dt/2 integrations.
    pub halving_delta: f64,
}

fn rhs(params: &ClassicalModeParams, y: &[C64; 4]) -> [C64; 4] {
    let ck2 = params.ck() * params.ck();
    let w2 = params.omega * params.omega;
    let e = params.coupling;
    [
        y[1],
        -ck2 * y[0] + e * y[3],
        y[3],
        -w2 * y[2] - e * y[1],
    ]
}

fn rk4_step(params: &ClassicalModeParams, y: &[C64; 4], dt: f64) -> [C64; 4] {
    let add = |a: &[C64; 4], b: &[C64; 4], f: f64| -> [C64; 4] {
        [
            a[0] + b[0] * f,
            a[1] + b[1] * f,
            a[2] + b[2] * f,
            a[3] + b[3] * f,
        ]
    };
    let k1 = rhs(params, y);
    let k2 = rhs(params, &add(y, &k1, dt / 2.0));
    let k3 = rhs(params, &add(y, &k2, dt / 2.0));
    let k4 = rhs(params, &add(y, &k3, dt));
    let mut out = *y;
    for i in 0..4 {
        out[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    }
    out
}

fn integrate(
    params: &ClassicalModeParams,
    y0: [C64; 4],
    tau_end: f64,
    steps: usize,
) -> (Vec<f64>, Vec<[C64; 4]>) {
    let dt = tau_end / steps as f64;
    let mut taus = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = y0;
    taus.push(0.0);
    states.push(y);
    for n in 1..=steps {
        y = rk4_step(params, &y, dt);
        taus.push(n as f64 * dt);
        states.push(y);
    }
    (taus, states)
}

/// Step-halving acceptance threshold for the RK4 oracle.
const HALVING_TOL: f64 = 1e-6;

/// Fixed-step RK4 integration of the coupled pair from the closed form's
/// initial data (phi, psi at zero, derivatives fixed by the
/// positive-frequency branch; the decoupled case degenerates to a free
/// wave). Fails if halving the step changes the endpoint by more than the
/// acceptance threshold.
pub fn ode_oracle(params: &ClassicalModeParams, tau_end: f64, dt: f64) -> Result<ModeTrace> {
    if dt <= 0.0 || tau_end <= 0.0 {
        return Err(SimError::SingularInput(format!(
            "need positive tau_end and dt, got {tau_end}, {dt}"
        )));
    }
    let zero = C64::new(0.0, 0.0);
    let y0 = if params.coupling == 0.0 {
        [
            C64::new(1.0, 0.0),
            C64::new(0.0, -params.ck()),
            zero,
            zero,
        ]
    } else {
        let (phi0, psi0) = mode_solution(params, 0.0)?;
        let (phi_dot0, psi_dot0) = mode_solution_derivative(params, 0.0)?;
        [phi0, phi_dot0, psi0, psi_dot0]
    };

    let steps = (tau_end / dt).ceil() as usize;
    let (taus, states) = integrate(params, y0, tau_end, steps);
    let (_, states_half) = integrate(params, y0, tau_end, steps * 2);

    let end = states.last().unwrap();
    let end_half = states_half.last().unwrap();
    let halving_delta = end
        .iter()
        .zip(end_half.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if halving_delta > HALVING_TOL {
        return Err(SimError::StepSizeNotConverged {
            dt,
            delta: halving_delta,
        });
    }

    let e0 = energy(params, &states[0]);
    let energy_drift = states
        .iter()
        .map(|y| (energy(params, y) - e0).abs() / e0.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);

    let (nu_plus, nu_minus) = dispersion(params);
    Ok(ModeTrace {
        phi: states.iter().map(|y| y[0]).collect(),
        psi: states.iter().map(|y| y[2]).collect(),
        taus,
        nu_plus,
        nu_minus,
        rabi: nu_plus - nu_minus,
        energy_drift,
        halving_delta,
    })
}

/// Extract the two oscillation frequencies of a trace by linear prediction:
/// a two-frequency signal satisfies s_{n+2} = p s_{n+1} + q s_n, so a
/// least-squares fit of (p, q) followed by a quadratic root solve recovers
/// the spectral peaks far below grid resolution.
pub fn spectral_peaks(trace: &ModeTrace) -> Result<(f64, f64)> {
    let n = trace.phi.len();
    if n < 8 {
        return Err(SimError::SingularInput(
            "trace too short for spectral analysis".into(),
        ));
    }
    // subsample so arg(root) stays well inside (-pi, pi]
    let stride = (n / 4096).max(1);
    let samples: Vec<C64> = trace.phi.iter().step_by(stride).copied().collect();
    let dt = (trace.taus[stride] - trace.taus[0]).abs();
    let m = samples.len() - 2;
    let mut a11 = C64::new(0.0, 0.0);
    let mut a12 = C64::new(0.0, 0.0);
    let mut a22 = C64::new(0.0, 0.0);
    let mut b1 = C64::new(0.0, 0.0);
    let mut b2 = C64::new(0.0, 0.0);
    for i in 0..m {
        let s0 = samples[i];
        let s1 = samples[i + 1];
        let s2 = samples[i + 2];
        a11 += s1.conj() * s1;
        a12 += s1.conj() * s0;
        a22 += s0.conj() * s0;
        b1 += s1.conj() * s2;
        b2 += s0.conj() * s2;
    }
    let det = a11 * a22 - a12 * a12.conj();
    if det.norm() < 1e-30 {
        return Err(SimError::SingularInput(
            "degenerate linear prediction system".into(),
        ));
    }
    let p = (b1 * a22 - a12 * b2) / det;
    let q = (a11 * b2 - a12.conj() * b1) / det;
    // roots of x^2 - p x - q
    let disc = (p * p + 4.0 * q).sqrt();
    let r1 = (p + disc) / 2.0;
    let r2 = (p - disc) / 2.0;
    let nu1 = -r1.arg() / dt;
    let nu2 = -r2.arg() / dt;
    Ok((nu1.max(nu2), nu1.min(nu2)))
}

/// One row of the wavenumber scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub k: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub rabi: f64,
    pub max_psi_sq: f64,
}

/// Dispersion, Rabi frequency and oscillation amplitude per wavenumber;
/// max |psi|^2 sampled from the closed form over one Rabi period.
pub fn amplitude_scan(
    omega: f64,
    coupling: f64,
    light_speed: f64,
    k_grid: &[f64],
) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let params = ClassicalModeParams::new(omega, k, light_speed, coupling)?;
        let (nu_plus, nu_minus) = dispersion(&params);
        let rabi = nu_plus - nu_minus;
        let max_psi_sq = if k == 0.0 {
            0.0
        } else {
            let period = 2.0 * std::f64::consts::PI / rabi.max(1e-300);
            let samples = 1024;
            let mut max: f64 = 0.0;
            for i in 0..=samples {
                let tau = period * i as f64 / samples as f64;
                let (_, psi) = mode_solution(&params, tau)?;
                max = max.max(psi.norm_sqr());
            }
            max
        };
        rows.push(ScanRow {
            k,
            nu_plus,
            nu_minus,
            rabi,
            max_psi_sq,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resonant() -> ClassicalModeParams {
        ClassicalModeParams::new(1.0, 1.0, 1.0, 0.1).unwrap()
    }

    #[test]
    fn dispersion_limits_and_values() {
        // decoupled: the two branches are the bare frequencies
        let p = ClassicalModeParams::new(1.0, 0.4, 1.0, 0.0).unwrap();
        let (plus, minus) = dispersion(&p);
        assert!((plus - 1.0).abs() < 1e-15);
        assert!((minus - 0.4).abs() < 1e-15);
        // resonant reference values
        let (plus, minus) = dispersion(&resonant());
        assert!((plus - 1.051249).abs() < 1e-6);
        assert!((minus - 0.951249).abs() < 1e-6);
        // the roots satisfy (nu^2 - c^2k^2)(nu^2 - w^2) = e^2 nu^2
        for p in [
            resonant(),
            ClassicalModeParams::new(1.3, 0.7, 2.0, 0.25).unwrap(),
        ] {
            for nu in [dispersion(&p).0, dispersion(&p).1] {
                let nu2 = nu * nu;
                let lhs = (nu2 - p.ck() * p.ck()) * (nu2 - p.omega * p.omega);
                let rhs = p.coupling * p.coupling * nu2;
                assert!((lhs - rhs).abs() < 1e-12 * (lhs.abs() + rhs.abs() + 1.0));
            }
        }
        // weak-coupling resonant split: nu_pm -> omega +- eps/2
        let p = ClassicalModeParams::new(1.0, 1.0, 1.0, 1e-3).unwrap();
        let (plus, minus) = dispersion(&p);
        assert!((plus - (1.0 + 5e-4)).abs() < 1e-6);
        assert!((minus - (1.0 - 5e-4)).abs() < 1e-6);
    }

    #[test]
    fn rabi_frequency_limits() {
        // at resonance the Rabi frequency equals the coupling exactly:
        // (nu+ - nu-)^2 = (w - ck)^2 + e^2
        assert!((rabi_frequency(&resonant()) - 0.1).abs() < 1e-12);
        // decoupled: the detuning
        let p = ClassicalModeParams::new(1.0, 1.5, 1.0, 0.0).unwrap();
        assert!((rabi_frequency(&p) - 0.5).abs() < 1e-12);
        // far detuned: approximately the detuning
        let p = ClassicalModeParams::new(1.0, 1.5, 1.0, 0.01).unwrap();
        assert!((rabi_frequency(&p) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn mode_solution_initial_conditions_and_resonance() {
        let p = resonant();
        let (phi, psi) = mode_solution(&p, 0.0).unwrap();
        assert!((phi - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(psi.norm() < 1e-15);
        // |psi|^2 = sin^2(eps tau / 2) up to O(eps^2) amplitude corrections
        for i in 0..=40 {
            let tau = 2.0 * std::f64::consts::PI / 0.1 * i as f64 / 40.0;
            let (phi, psi) = mode_solution(&p, tau).unwrap();
            let expect_psi = (0.05 * tau).sin().powi(2);
            let expect_phi = (0.05 * tau).cos().powi(2);
            assert!((psi.norm_sqr() - expect_psi).abs() < 1e-3, "tau={tau}");
            assert!((phi.norm_sqr() - expect_phi).abs() < 1e-3, "tau={tau}");
        }
    }

    #[test]
    fn far_detuned_amplitude() {
        // max |psi|^2 ~ 4 e^2 c^2 k^2 / (w^2 - c^2 k^2)^2 = 0.0576 at ck/w = 1.5
        let p = ClassicalModeParams::new(1.0, 1.5, 1.0, 0.1).unwrap();
        let rabi = rabi_frequency(&p);
        let mut max: f64 = 0.0;
        for i in 0..=2048 {
            let tau = 2.0 * std::f64::consts::PI / rabi * i as f64 / 2048.0;
            let (_, psi) = mode_solution(&p, tau).unwrap();
            max = max.max(psi.norm_sqr());
        }
        assert!((max - 0.0576).abs() < 0.05 * 0.0576, "max {max}");
    }

    #[test]
    fn closed_form_satisfies_the_odes() {
        // second derivatives via a 5-point stencil on the analytic first
        // derivatives; plain second differences would bottom out at ~1e-7
        let h = 1e-4;
        for p in [
            resonant(),
            ClassicalModeParams::new(1.2, 0.8, 1.0, 0.3).unwrap(),
        ] {
            for tau in [0.3, 2.0, 17.5] {
                let d = |f: &dyn Fn(f64) -> C64, x: f64| -> C64 {
                    (-f(x + 2.0 * h) + f(x + h) * 8.0 - f(x - h) * 8.0 + f(x - 2.0 * h))
                        / (12.0 * h)
                };
                let phi_dot = |t: f64| mode_solution_derivative(&p, t).unwrap().0;
                let psi_dot = |t: f64| mode_solution_derivative(&p, t).unwrap().1;
                let (phi, psi) = mode_solution(&p, tau).unwrap();
                let phi_ddot = d(&phi_dot, tau);
                let psi_ddot = d(&psi_dot, tau);
                let ck2 = p.ck() * p.ck();
                let r1 = phi_ddot + ck2 * phi - p.coupling * psi_dot(tau);
                let r2 = psi_ddot + p.omega * p.omega * psi + p.coupling * phi_dot(tau);
                assert!(r1.norm() < 1e-9, "field eq residual {:.3e}", r1.norm());
                assert!(r2.norm() < 1e-9, "chain eq residual {:.3e}", r2.norm());
                // the analytic first derivative matches differentiating the
                // solution itself
                let phi_of = |t: f64| mode_solution(&p, t).unwrap().0;
                assert!((d(&phi_of, tau) - phi_dot(tau)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn oracle_free_wave_limit() {
        let p = ClassicalModeParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let trace = ode_oracle(&p, 50.0, 1e-3).unwrap();
        for (tau, phi) in trace.taus.iter().zip(&trace.phi) {
            let expect = C64::from_polar(1.0, -tau);
            assert!((phi - expect).norm() < 1e-8, "tau={tau}");
        }
        assert!(trace.energy_drift < 1e-10);
    }

    #[test]
    fn oracle_full_transfer_at_resonance() {
        let p = resonant();
        let tau_end = std::f64::consts::PI / 0.1;
        let trace = ode_oracle(&p, tau_end, 1e-3).unwrap();
        let last = trace.psi.last().unwrap();
        assert!((last.norm_sqr() - 1.0).abs() < 1e-3, "{}", last.norm_sqr());
    }

    #[test]
    fn oracle_matches_closed_form_pointwise() {
        let p = resonant();
        let rabi = rabi_frequency(&p);
        let trace = ode_oracle(&p, 4.0 * std::f64::consts::PI / rabi, 1e-3).unwrap();
        for ((tau, phi), psi) in trace.taus.iter().zip(&trace.phi).zip(&trace.psi) {
            let (phi_c, psi_c) = mode_solution(&p, *tau).unwrap();
            assert!((phi - phi_c).norm() < 1e-6, "tau={tau}");
            assert!((psi - psi_c).norm() < 1e-6, "tau={tau}");
        }
    }

    #[test]
    fn oracle_rejects_coarse_steps() {
        let p = ClassicalModeParams::new(1.0, 1.0, 1.0, 0.5).unwrap();
        let err = ode_oracle(&p, 200.0, 0.9).unwrap_err();
        assert!(matches!(err, SimError::StepSizeNotConverged { .. }));
    }

    #[test]
    fn degenerate_modes_reported() {
        let p = ClassicalModeParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let err = mode_solution(&p, 1.0).unwrap_err();
        assert!(matches!(err, SimError::DegenerateModes(_)));
        // continuity: a tiny coupling lifts the degeneracy and matches the
        // oracle
        let p = ClassicalModeParams::new(1.0, 1.0, 1.0, 1e-4).unwrap();
        let trace = ode_oracle(&p, 100.0, 1e-3).unwrap();
        for (i, tau) in trace.taus.iter().enumerate().step_by(5_000) {
            let (phi_c, psi_c) = mode_solution(&p, *tau).unwrap();
            assert!((trace.phi[i] - phi_c).norm() < 1e-6);
            assert!((trace.psi[i] - psi_c).norm() < 1e-6);
        }
    }

    #[test]
    fn spectral_peaks_recover_dispersion() {
        let p = resonant();
        let trace = ode_oracle(&p, 400.0, 2e-3).unwrap();
        let (nu_plus, nu_minus) = spectral_peaks(&trace).unwrap();
        let (expect_plus, expect_minus) = dispersion(&p);
        assert!((nu_plus - expect_plus).abs() < 1e-4, "{nu_plus}");
        assert!((nu_minus - expect_minus).abs() < 1e-4, "{nu_minus}");
    }

    #[test]
    fn amplitude_scan_shape() {
        let ks: Vec<f64> = (0..=100).map(|i| 0.5 + i as f64 / 100.0).collect();
        let rows = amplitude_scan(1.0, 0.1, 1.0, &ks).unwrap();
        // peak sits at kc/w = 1 and the Rabi frequency has its minimum there
        let peak = rows
            .iter()
            .max_by(|a, b| a.max_psi_sq.partial_cmp(&b.max_psi_sq).unwrap())
            .unwrap();
        assert!((peak.k - 1.0).abs() < 1e-12);
        let rabi_min = rows
            .iter()
            .min_by(|a, b| a.rabi.partial_cmp(&b.rabi).unwrap())
            .unwrap();
        assert!((rabi_min.k - 1.0).abs() < 1e-12);
        // detuned endpoint value and the peak dominance
        let detuned = rows.iter().find(|r| (r.k - 1.5).abs() < 1e-12).unwrap();
        assert!((detuned.max_psi_sq - 0.0576).abs() < 0.05 * 0.0576);
        assert!(peak.max_psi_sq / detuned.max_psi_sq > 15.0);
        // k -> 0 decouples
        let tiny = amplitude_scan(1.0, 0.1, 1.0, &[1e-6]).unwrap();
        assert!(tiny[0].max_psi_sq < 1e-11);
    }
}
