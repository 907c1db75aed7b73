//! Uniformly accelerated chain geometry: worldlines, Rindler mode
//! functions, and the discrete overlap sum showing that a long chain's
//! collective mode couples selectively to a single Rindler frequency.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SimError};

/// Geometry of a finite oscillator chain at rest in the co-moving frame.
#[derive(Debug, Clone)]
pub struct ChainGeometry {
    /// Proper acceleration of the oscillator at zbar = 0.
    pub accel: f64,
    pub light_speed: f64,
    /// Common oscillator frequency in Rindler time.
    pub omega_chain: f64,
    /// Co-moving positions zbar_m.
    pub positions: Vec<f64>,
    /// Oscillators per unit zbar (uniform chains).
    pub density: f64,
    /// Collective-mode normalization, sqrt(M) for a uniform chain of M
    /// oscillators so the collective operator stays bosonic.
    pub normalization: f64,
}

impl ChainGeometry {
    /// Uniform chain of `count` oscillators spaced `spacing` apart,
    /// starting at zbar = 0.
    pub fn uniform(
        count: usize,
        spacing: f64,
        accel: f64,
        light_speed: f64,
        omega_chain: f64,
    ) -> Result<Self> {
        if count == 0 {
            return Err(SimError::SingularInput("empty chain".into()));
        }
        if accel <= 0.0 || light_speed <= 0.0 || spacing <= 0.0 {
            return Err(SimError::SingularInput(format!(
                "need accel, light speed and spacing > 0, got {accel}, {light_speed}, {spacing}"
            )));
        }
        Ok(ChainGeometry {
            accel,
            light_speed,
            omega_chain,
            positions: (0..count).map(|m| m as f64 * spacing).collect(),
            density: 1.0 / spacing,
            normalization: (count as f64).sqrt(),
        })
    }

    pub fn oscillator_count(&self) -> usize {
        self.positions.len()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.density
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Wedge {
    /// z > c|t|.
    Right,
    /// z < -c|t|.
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MoveDirection {
    /// Functions of z/c - t.
    RightMoving,
    /// Functions of z/c + t; obtained from the right-moving modes by
    /// coordinate inversion z -> -z.
    LeftMoving,
}

/// One Rindler mode: dimensionless frequency, wedge, propagation direction.
#[derive(Debug, Clone, Copy)]
pub struct RindlerModeSpec {
    pub omega: f64,
    pub wedge: Wedge,
    pub direction: MoveDirection,
}

impl RindlerModeSpec {
    pub fn new(omega: f64, wedge: Wedge, direction: MoveDirection) -> Result<Self> {
        if omega <= 0.0 {
            return Err(SimError::SingularInput(format!(
                "Rindler frequency must be positive, got {omega}"
            )));
        }
        Ok(RindlerModeSpec {
            omega,
            wedge,
            direction,
        })
    }
}

/// Worldline of the oscillator at co-moving position zbar:
/// t = (c/a) e^(a zbar/c^2) sinh(a tau/c), z = (c^2/a) e^(a zbar/c^2) cosh(a tau/c).
pub fn trajectory(geometry: &ChainGeometry, zbar: f64, tau: f64) -> (f64, f64) {
    let a = geometry.accel;
    let c = geometry.light_speed;
    let envelope = (a * zbar / (c * c)).exp();
    let arg = a * tau / c;
    (
        c / a * envelope * arg.sinh(),
        c * c / a * envelope * arg.cosh(),
    )
}

/// Rindler mode function at a spacetime point; zero outside the mode's
/// wedge support (and on its boundary). The right-wedge mode is
/// (z/c - t)^(i Omega)/sqrt(Omega), the left-wedge one
/// (t - z/c)^(-i Omega)/sqrt(Omega); left-moving modes evaluate the
/// right-moving formula at -z.
pub fn rindler_mode_value(spec: &RindlerModeSpec, t: f64, z: f64, light_speed: f64) -> C64 {
    let z_eff = match spec.direction {
        MoveDirection::RightMoving => z,
        MoveDirection::LeftMoving => -z,
    };
    let amplitude = 1.0 / spec.omega.sqrt();
    match spec.wedge {
        Wedge::Right => {
            let u = z_eff / light_speed - t;
            if u <= 0.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::from_polar(amplitude, spec.omega * u.ln())
            }
        }
        Wedge::Left => {
            let v = t - z_eff / light_speed;
            if v <= 0.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::from_polar(amplitude, -spec.omega * v.ln())
            }
        }
    }
}

/// Wavenumber of the collective mode resonant with the given Rindler
/// frequency: k_Omega = Omega a / c^2.
pub fn resonant_wavenumber(geometry: &ChainGeometry, spec: &RindlerModeSpec) -> f64 {
    spec.omega * geometry.accel / (geometry.light_speed * geometry.light_speed)
}

/// Discrete overlap S(k, Omega) = (1/N) sum_m exp(i (k_Omega - k) zbar_m):
/// the amplitude coupling the collective mode at wavenumber k to the
/// Rindler mode. Constructive (= sqrt(M)) exactly at k = k_Omega.
pub fn collective_coupling(
    geometry: &ChainGeometry,
    k: f64,
    spec: &RindlerModeSpec,
) -> Result<C64> {
    if geometry.positions.is_empty() {
        return Err(SimError::SingularInput("empty chain".into()));
    }
    let k_res = resonant_wavenumber(geometry, spec);
    let mut sum = C64::new(0.0, 0.0);
    for &zbar in &geometry.positions {
        sum += C64::from_polar(1.0, (k_res - k) * zbar);
    }
    Ok(sum / geometry.normalization)
}

/// |S| over an (Omega, k) grid plus the diagonal-dominance statistic.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub omegas: Vec<f64>,
    pub ks: Vec<f64>,
    /// Row per Omega, column per k.
    pub magnitudes: Vec<Vec<f64>>,
    /// On-resonance |S| divided by the largest off-resonance |S|, per Omega.
    pub per_omega_dominance: Vec<f64>,
    /// Minimum over the Omega grid.
    pub dominance: f64,
    /// Half-width of the detuning window treated as on-resonance.
    pub exclusion: f64,
}

/// Off-resonance exclusion window: two main Dirichlet lobes or a tenth of
/// the Brillouin zone, whichever is wider. Inside two lobes the kernel has
/// no selectivity to measure, and the zone fraction keeps the statistic
/// comparable across chain lengths.
pub fn exclusion_window(geometry: &ChainGeometry) -> f64 {
    let spacing = geometry.spacing();
    let m = geometry.oscillator_count() as f64;
    let lobe = 2.0 * std::f64::consts::PI / (m * spacing);
    (2.0 * lobe).max(0.2 * std::f64::consts::PI / spacing)
}

pub fn coupling_selectivity_report(
    geometry: &ChainGeometry,
    omega_grid: &[f64],
    k_grid: &[f64],
) -> Result<CouplingReport> {
    if omega_grid.is_empty() || k_grid.is_empty() {
        return Err(SimError::SingularInput("empty grid".into()));
    }
    let exclusion = exclusion_window(geometry);
    let mut magnitudes = Vec::with_capacity(omega_grid.len());
    let mut per_omega_dominance = Vec::with_capacity(omega_grid.len());
    for &omega in omega_grid {
        let spec = RindlerModeSpec::new(omega, Wedge::Right, MoveDirection::RightMoving)?;
        let k_res = resonant_wavenumber(geometry, &spec);
        let row: Vec<f64> = k_grid
            .iter()
            .map(|&k| {
                collective_coupling(geometry, k, &spec)
                    .map(|s| s.norm())
                    .unwrap_or(0.0)
            })
            .collect();
        let on_res = collective_coupling(geometry, k_res, &spec)?.norm();
        let max_off = k_grid
            .iter()
            .zip(&row)
            .filter(|(&k, _)| (k - k_res).abs() >= exclusion)
            .map(|(_, &v)| v)
            .fold(0.0f64, f64::max);
        per_omega_dominance.push(if max_off > 0.0 {
            on_res / max_off
        } else {
            f64::INFINITY
        });
        magnitudes.push(row);
    }
    let dominance = per_omega_dominance.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CouplingReport {
        omegas: omega_grid.to_vec(),
        ks: k_grid.to_vec(),
        magnitudes,
        per_omega_dominance,
        dominance,
        exclusion,
    })
}

/// Default report grids: five Rindler frequencies bracketing the chain
/// resonance and 251 wavenumbers spanning one Brillouin zone around the
/// central resonant wavenumber.
pub fn default_grids(geometry: &ChainGeometry) -> (Vec<f64>, Vec<f64>) {
    let c = geometry.light_speed;
    let omega_res = geometry.omega_chain * c / geometry.accel;
    let omegas: Vec<f64> = [0.6, 0.8, 1.0, 1.2, 1.4]
        .iter()
        .map(|f| f * omega_res)
        .collect();
    let k_center = geometry.omega_chain / c;
    let half_span = std::f64::consts::PI / geometry.spacing();
    let points = 251;
    let ks: Vec<f64> = (0..points)
        .map(|i| k_center - half_span + 2.0 * half_span * i as f64 / (points - 1) as f64)
        .collect();
    (omegas, ks)
}
