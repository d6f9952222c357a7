//! Casimir energy and force per unit area between the two interfaces, by
//! imaginary-frequency integration of the dispersion function.
//!
//! Energy per area:
//! `E = (hbar / 4 pi^2) sum_pol int_0^inf k dk int_0^inf dzeta ln D(i zeta)`,
//! with `D(i zeta) = 1 - r^2 exp(-4 a kappa_2)` real and in `(0, 1]`, so the
//! integrand is non-positive and the energy negative (binding).
//!
//! Force per area (attractive, negative):
//! `F = -(hbar / 2 pi^2) sum_pol int_0^inf k dk int_0^inf dzeta
//!      kappa_2 [r^{-2} exp(4 a kappa_2) - 1]^{-1}`,
//! which is `-dE/d(2a)` term by term.
//!
//! An alternative form trades `(zeta, k)` for `(zeta, p)` with
//! `kappa_2 = p zeta / c`, `p >= 1`:
//! `F = -(hbar / 2 pi^2 c^3) sum_pol int_0^inf zeta^3 dzeta int_1^inf p^2 dp
//!      [r^{-2}(i zeta, p) exp(2 p zeta d / c) - 1]^{-1}`,
//! `r_tm^{-1} = (s + eps p)/(s - eps p)`, `r_te^{-1} = (s + p)/(s - p)`,
//! `s = sqrt(eps - 1 + p^2)`, valid for a vacuum gap. Agreement between the
//! two forms is a strong cross-check of branch rules and prefactors.

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float as _;

use crate::consts::{C, HBAR};
use crate::quad::{integrate_semi_infinite, QuadError};
use crate::scattering::{
    fresnel_single, layer_wavenumber, FrequencyPoint, LayerConfig, Polarization, ScatteringError,
};

/// The pair of mirrors bounding the gap.
#[derive(Debug, Clone, PartialEq)]
pub enum GapSpec {
    /// Perfectly reflecting mirrors: `r^2 = 1` at every frequency. The
    /// half-gap is `a`; the mirror separation is `d = 2a`.
    Ideal { half_gap: f64 },
    /// Material mirrors described by a layer configuration whose media are
    /// evaluable on the imaginary axis.
    Material(LayerConfig),
}

impl GapSpec {
    pub fn half_gap(&self) -> f64 {
        match self {
            Self::Ideal { half_gap } => *half_gap,
            Self::Material(cfg) => cfg.half_gap,
        }
    }

    /// Mirror separation `d = 2a`.
    pub fn separation(&self) -> f64 {
        2.0 * self.half_gap()
    }
}

/// Tolerances and budget for the nested quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Evaluation budget per 1-D integral; at least 1000.
    pub max_evals: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_evals: 2_000_000 }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<(), LifshitzError> {
        if !(self.rel_tol > 0.0) && !(self.abs_tol > 0.0) {
            return Err(LifshitzError::InvalidSpec("need a positive tolerance"));
        }
        if self.max_evals < 1000 {
            return Err(LifshitzError::InvalidSpec("max_evals must be at least 1000"));
        }
        Ok(())
    }
}

/// An integrated quantity with its polarization breakdown.
///
/// `value == te + tm` exactly (the total is formed as that sum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    pub value: f64,
    /// Estimated absolute error, from the quadrature error estimates.
    pub error: f64,
    /// Total integrand evaluations across both polarizations and both levels.
    pub evals: u64,
    pub te: f64,
    pub tm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LifshitzError {
    Scattering(ScatteringError),
    Quadrature(QuadError),
    InvalidSpec(&'static str),
    /// The requested form needs a vacuum gap between material mirrors.
    NotVacuumGap,
}

impl fmt::Display for LifshitzError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scattering(e) => write!(f, "scattering: {e}"),
            Self::Quadrature(e) => write!(f, "quadrature: {e}"),
            Self::InvalidSpec(what) => write!(f, "invalid quadrature spec: {what}"),
            Self::NotVacuumGap => write!(f, "this form requires a vacuum gap"),
        }
    }
}

impl core::error::Error for LifshitzError {}

impl From<ScatteringError> for LifshitzError {
    fn from(e: ScatteringError) -> Self {
        Self::Scattering(e)
    }
}

impl From<QuadError> for LifshitzError {
    fn from(e: QuadError) -> Self {
        Self::Quadrature(e)
    }
}

/// `x = r^2 exp(-4 a kappa_2) = 1 - D(i zeta)` and the gap decay rate
/// `kappa_2(i zeta, k)` for either mirror model.
///
/// `x` is carried instead of `D` so the exponentially small tail is kept at
/// full relative accuracy; forming `1 - D` would lose it to cancellation.
fn reflection_weight(
    gap: &GapSpec,
    pol: Polarization,
    zeta: f64,
    k: f64,
) -> Result<(f64, f64), LifshitzError> {
    match gap {
        GapSpec::Ideal { half_gap } => {
            let kappa = libm::hypot(k, zeta / C);
            Ok(((-4.0 * half_gap * kappa).exp(), kappa))
        }
        GapSpec::Material(cfg) => {
            let f = FrequencyPoint::ImagAxis(zeta);
            let r = fresnel_single(pol, &cfg.outer, &cfg.inner, f, k)?.r_l.re;
            let kappa = layer_wavenumber(&cfg.inner, f, k)?.value.re;
            Ok((r * r * (-4.0 * cfg.half_gap * kappa).exp(), kappa))
        }
    }
}

/// `ln D(i zeta, k)` for one polarization; non-positive by construction.
pub fn log_dispersion_integrand(
    gap: &GapSpec,
    pol: Polarization,
    zeta: f64,
    k: f64,
) -> Result<f64, LifshitzError> {
    let (x, _) = reflection_weight(gap, pol, zeta, k)?;
    if !(x < 1.0) {
        return Err(LifshitzError::Scattering(ScatteringError::Pole {
            residual: (1.0 - x).abs(),
        }));
    }
    Ok(libm::log1p(-x.max(0.0)))
}

/// Shared nested quadrature: integrates
/// `int_0^inf k dk int_0^inf dzeta inner(zeta, k)` for one polarization.
///
/// The `zeta` integral uses the scale `c / 2a` and a tolerance 10x tighter
/// than the outer one; the `k` integral uses the scale `1 / 2a`. Both map the
/// half-line through `x = scale * u / (1 - u)`.
fn nested_integral<G>(
    gap: &GapSpec,
    quad: &QuadratureSpec,
    mut inner: G,
) -> Result<(f64, f64, u64), LifshitzError>
where
    G: FnMut(f64, f64) -> f64,
{
    let d = gap.separation();
    let zeta_scale = C / d;
    let k_scale = 1.0 / d;
    let mut inner_evals: u64 = 0;
    let mut inner_error: f64 = 0.0;
    let mut inner_failed: Option<QuadError> = None;
    let outer = integrate_semi_infinite(
        |k| {
            if inner_failed.is_some() {
                return 0.0;
            }
            match integrate_semi_infinite(
                |zeta| inner(zeta, k),
                zeta_scale,
                0.1 * quad.rel_tol,
                0.1 * quad.abs_tol,
                quad.max_evals,
            ) {
                Ok(r) => {
                    inner_evals += r.evals;
                    inner_error = inner_error.max(r.error);
                    k * r.value
                }
                Err(e) => {
                    inner_failed = Some(e);
                    0.0
                }
            }
        },
        k_scale,
        quad.rel_tol,
        quad.abs_tol,
        quad.max_evals,
    );
    if let Some(e) = inner_failed {
        return Err(e.into());
    }
    let outer = outer?;
    Ok((outer.value, outer.error + inner_error, outer.evals + inner_evals))
}

/// Casimir energy per unit area (J/m^2), negative for binding mirrors.
pub fn energy_per_area(
    gap: &GapSpec,
    quad: &QuadratureSpec,
) -> Result<ForceResult, LifshitzError> {
    quad.validate()?;
    let prefactor = HBAR / (4.0 * core::f64::consts::PI * core::f64::consts::PI);
    let mut parts = [0.0_f64; 2];
    let mut error = 0.0;
    let mut evals = 0;
    for (i, pol) in Polarization::BOTH.iter().enumerate() {
        let (v, e, n) = nested_integral(gap, quad, |zeta, k| {
            log_dispersion_integrand(gap, *pol, zeta, k).unwrap_or(0.0)
        })?;
        parts[i] = prefactor * v;
        error += prefactor * e;
        evals += n;
    }
    let (te, tm) = split(parts);
    Ok(ForceResult { value: te + tm, error, evals, te, tm })
}

/// Casimir force per unit area (Pa), negative for attraction.
pub fn force_per_area(
    gap: &GapSpec,
    quad: &QuadratureSpec,
) -> Result<ForceResult, LifshitzError> {
    quad.validate()?;
    let prefactor = -HBAR / (2.0 * core::f64::consts::PI * core::f64::consts::PI);
    let mut parts = [0.0_f64; 2];
    let mut error = 0.0;
    let mut evals = 0;
    for (i, pol) in Polarization::BOTH.iter().enumerate() {
        let (v, e, n) = nested_integral(gap, quad, |zeta, k| {
            match reflection_weight(gap, *pol, zeta, k) {
                // kappa_2 x/(1 - x) = kappa_2 [r^{-2} e^{4 a kappa_2} - 1]^{-1}
                Ok((x, kappa)) if x < 1.0 => kappa * x.max(0.0) / (1.0 - x),
                _ => 0.0,
            }
        })?;
        parts[i] = prefactor * v;
        error += prefactor.abs() * e;
        evals += n;
    }
    let (te, tm) = split(parts);
    Ok(ForceResult { value: te + tm, error, evals, te, tm })
}

/// Force per unit area in the `(zeta, p)` variables; vacuum gap only.
///
/// Uses `eps(i zeta)` of the outer medium and the reflection factors
/// `r_tm^{-2} = ((s + eps p)/(s - eps p))^2`,
/// `r_te^{-2} = ((s + p)/(s - p))^2`, `s = sqrt(eps - 1 + p^2)`.
pub fn force_p_form(
    gap: &GapSpec,
    quad: &QuadratureSpec,
) -> Result<ForceResult, LifshitzError> {
    quad.validate()?;
    let cfg = match gap {
        GapSpec::Material(cfg) if cfg.has_vacuum_gap() => cfg,
        _ => return Err(LifshitzError::NotVacuumGap),
    };
    let d = gap.separation();
    let prefactor = -HBAR / (2.0 * core::f64::consts::PI * core::f64::consts::PI * C * C * C);
    let zeta_scale = C / d;
    let mut parts = [0.0_f64; 2];
    let mut error = 0.0;
    let mut evals = 0;
    for (i, pol) in Polarization::BOTH.iter().enumerate() {
        let mut inner_evals: u64 = 0;
        let mut inner_error: f64 = 0.0;
        let mut inner_failed: Option<LifshitzError> = None;
        let outer = integrate_semi_infinite(
            |zeta| {
                if inner_failed.is_some() {
                    return 0.0;
                }
                let eps = match cfg.outer.permittivity.eval_imag_axis(zeta) {
                    Ok(e) => e,
                    Err(e) => {
                        inner_failed = Some(LifshitzError::Scattering(e.into()));
                        return 0.0;
                    }
                };
                let mu = cfg.outer.permeability;
                // p runs over (1, inf); map t in (0, inf) to p = 1 + t.
                let r = integrate_semi_infinite(
                    |t| {
                        let p = 1.0 + t;
                        let s = (eps * mu - 1.0 + p * p).sqrt();
                        let expf = (2.0 * p * zeta * d / C).exp();
                        let rtm_inv = (s + eps * p) / (s - eps * p);
                        let rte_inv = (s + mu * p) / (s - mu * p);
                        let r_inv2 = match pol {
                            Polarization::Tm => rtm_inv * rtm_inv,
                            Polarization::Te => rte_inv * rte_inv,
                        };
                        p * p / (r_inv2 * expf - 1.0)
                    },
                    C / (zeta * d).max(1e-300),
                    0.1 * quad.rel_tol,
                    0.1 * quad.abs_tol,
                    quad.max_evals,
                );
                match r {
                    Ok(r) => {
                        inner_evals += r.evals;
                        inner_error = inner_error.max(r.error);
                        zeta * zeta * zeta * r.value
                    }
                    Err(e) => {
                        inner_failed = Some(e.into());
                        0.0
                    }
                }
            },
            zeta_scale,
            quad.rel_tol,
            quad.abs_tol,
            quad.max_evals,
        );
        if let Some(e) = inner_failed {
            return Err(e);
        }
        let outer = outer?;
        parts[i] = prefactor * outer.value;
        error += prefactor.abs() * (outer.error + inner_error);
        evals += outer.evals + inner_evals;
    }
    let (te, tm) = split(parts);
    Ok(ForceResult { value: te + tm, error, evals, te, tm })
}

/// Map the per-polarization parts (in `Polarization::BOTH` order) to (te, tm).
fn split(parts: [f64; 2]) -> (f64, f64) {
    let mut te = 0.0;
    let mut tm = 0.0;
    for (pol, v) in Polarization::BOTH.iter().zip(parts) {
        match pol {
            Polarization::Te => te = v,
            Polarization::Tm => tm = v,
        }
    }
    (te, tm)
}

/// Closed form for ideal mirrors: `E = -pi^2 hbar c / (720 d^3)`.
pub fn ideal_mirror_energy(d: f64) -> f64 {
    let pi2 = core::f64::consts::PI * core::f64::consts::PI;
    -pi2 * HBAR * C / (720.0 * d * d * d)
}

/// Closed form for ideal mirrors: `F = -pi^2 hbar c / (240 d^4)`.
pub fn ideal_mirror_force(d: f64) -> f64 {
    let pi2 = core::f64::consts::PI * core::f64::consts::PI;
    -pi2 * HBAR * C / (240.0 * d * d * d * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dielectric::{Medium, PermittivityModel};
    use alloc::vec::Vec;
    use approx::assert_relative_eq;

    const WP: f64 = 1.38e16;

    fn gold_plasma_gap(d: f64) -> GapSpec {
        let outer = Medium::new(PermittivityModel::plasma(WP).unwrap(), 1.0).unwrap();
        GapSpec::Material(LayerConfig::vacuum_gap(outer, 0.5 * d).unwrap())
    }

    #[test]
    fn ideal_mirror_energy_oracle() {
        let d = 1e-6;
        let gap = GapSpec::Ideal { half_gap: 0.5 * d };
        let r = energy_per_area(&gap, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, ideal_mirror_energy(d), max_relative = 1e-6);
        // Four-digit reference value at d = 1 micron.
        assert_relative_eq!(r.value, -4.3337e-10, max_relative = 1e-4);
        // Equal TE and TM shares for ideal mirrors.
        assert_relative_eq!(r.te, r.tm, max_relative = 1e-9);
        assert_eq!(r.value, r.te + r.tm);
    }

    #[test]
    fn ideal_mirror_force_oracle() {
        let d = 1e-6;
        let gap = GapSpec::Ideal { half_gap: 0.5 * d };
        let r = force_per_area(&gap, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, ideal_mirror_force(d), max_relative = 1e-6);
        assert_relative_eq!(r.value, -1.3001e-3, max_relative = 1e-4);
        assert!(r.value < 0.0);
    }

    #[test]
    fn force_d4_scaling_constant() {
        // F(d) d^4 is the same constant at three separations.
        let quad = QuadratureSpec::default();
        let mut c4 = Vec::new();
        for d in [0.5e-6, 1e-6, 2e-6] {
            let gap = GapSpec::Ideal { half_gap: 0.5 * d };
            let r = force_per_area(&gap, &quad).unwrap();
            c4.push(r.value * d * d * d * d);
        }
        assert_relative_eq!(c4[0], c4[1], max_relative = 1e-6);
        assert_relative_eq!(c4[1], c4[2], max_relative = 1e-6);
    }

    #[test]
    fn large_eps_limits_to_ideal() {
        // Constant eps = 1e8 mirrors: reflectivity defects are O(1/sqrt(eps)).
        let d = 1e-6;
        let outer = Medium::new(PermittivityModel::Constant(1e8), 1.0).unwrap();
        let gap = GapSpec::Material(LayerConfig::vacuum_gap(outer, 0.5 * d).unwrap());
        let r = force_per_area(&gap, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, ideal_mirror_force(d), max_relative = 5e-3);
        assert!(r.value.abs() < ideal_mirror_force(d).abs());
    }

    #[test]
    fn p_form_matches_k_form() {
        let gap = gold_plasma_gap(100e-9);
        let quad = QuadratureSpec::default();
        let fk = force_per_area(&gap, &quad).unwrap();
        let fp = force_p_form(&gap, &quad).unwrap();
        assert_relative_eq!(fk.value, fp.value, max_relative = 1e-8);
        assert_relative_eq!(fk.tm, fp.tm, max_relative = 1e-8);
        assert_relative_eq!(fk.te, fp.te, max_relative = 1e-8);
    }

    #[test]
    fn force_is_energy_derivative() {
        let d = 200e-9;
        let gap = gold_plasma_gap(d);
        let quad = QuadratureSpec::default();
        let f = force_per_area(&gap, &quad).unwrap().value;
        let h = 1e-3 * d;
        let ep = energy_per_area(&gold_plasma_gap(d + h), &quad).unwrap().value;
        let em = energy_per_area(&gold_plasma_gap(d - h), &quad).unwrap().value;
        let de = (ep - em) / (2.0 * h);
        assert!(
            (f + de).abs() / f.abs() <= 1e-4,
            "F = {f:e}, -dE/dd = {:e}",
            -de
        );
    }

    #[test]
    fn drude_dissipation_small_correction() {
        // gamma = 0.004 omega_p changes the force by well under 2%.
        let d = 100e-9;
        let quad = QuadratureSpec { rel_tol: 1e-8, ..QuadratureSpec::default() };
        let plasma = force_per_area(&gold_plasma_gap(d), &quad).unwrap().value;
        let drude_medium =
            Medium::new(PermittivityModel::drude(WP, 0.004 * WP).unwrap(), 1.0).unwrap();
        let gap = GapSpec::Material(LayerConfig::vacuum_gap(drude_medium, 0.5 * d).unwrap());
        let drude = force_per_area(&gap, &quad).unwrap().value;
        let rel = ((drude - plasma) / plasma).abs();
        assert!(rel < 0.02, "relative deviation {rel}");
        // Dissipation weakens the reflectivity, hence the attraction.
        assert!(drude.abs() < plasma.abs());
    }

    #[test]
    fn log_integrand_non_positive() {
        let gap = gold_plasma_gap(100e-9);
        let d = 100e-9;
        for i in 0..20 {
            for j in 0..20 {
                let zeta = (C / d) * libm::pow(10.0, -3.0 + 6.0 * i as f64 / 19.0);
                let k = (1.0 / d) * libm::pow(10.0, -3.0 + 6.0 * j as f64 / 19.0);
                for pol in Polarization::BOTH {
                    let v = log_dispersion_integrand(&gap, pol, zeta, k).unwrap();
                    assert!(v <= 0.0 && v.is_finite(), "ln D = {v} at ({zeta:e}, {k:e})");
                }
            }
        }
    }

    #[test]
    fn material_weaker_than_ideal() {
        // Real mirrors always bind less strongly than ideal ones.
        let d = 100e-9;
        let quad = QuadratureSpec::default();
        let material = force_per_area(&gold_plasma_gap(d), &quad).unwrap().value;
        assert!(material < 0.0);
        assert!(material.abs() < ideal_mirror_force(d).abs());
    }

    #[test]
    fn spec_validation() {
        let gap = GapSpec::Ideal { half_gap: 50e-9 };
        let bad = QuadratureSpec { rel_tol: 0.0, abs_tol: 0.0, max_evals: 10_000 };
        assert!(matches!(
            energy_per_area(&gap, &bad),
            Err(LifshitzError::InvalidSpec(_))
        ));
        let bad = QuadratureSpec { max_evals: 10, ..QuadratureSpec::default() };
        assert!(matches!(
            force_per_area(&gap, &bad),
            Err(LifshitzError::InvalidSpec(_))
        ));
        assert!(matches!(
            force_p_form(&gap, &QuadratureSpec::default()),
            Err(LifshitzError::NotVacuumGap)
        ));
    }
}
