//! Wavenumber branch bookkeeping, Fresnel amplitudes, the dispersion function
//! `D`, and the unitary 1-D scattering matrix of the symmetric stack.
//!
//! Two frequency axes are supported. On the real axis the layer wavenumber is
//! `k_a = sqrt(eps mu w^2/c^2 - k^2)` with the evanescent branch fixed to
//! `k_a = +i |k_a|`; on the imaginary axis the real quantity
//! `kappa_a = sqrt(eps(i zeta) mu zeta^2/c^2 + k^2)` is used throughout and the
//! dispersion function carries the decaying exponential `exp(-4 a kappa_2)`.

use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::consts::C;
use crate::dielectric::{DielectricError, Medium, PermittivityModel};

/// Relative window around amplitude poles inside which evaluation is refused.
pub const POLE_WINDOW: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te,
    Tm,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Te, Polarization::Tm];

    pub fn label(self) -> &'static str {
        match self {
            Self::Te => "TE",
            Self::Tm => "TM",
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A point on one of the two admissible frequency axes (rad/s, > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyPoint {
    RealAxis(f64),
    ImagAxis(f64),
}

impl FrequencyPoint {
    pub fn magnitude(self) -> f64 {
        match self {
            Self::RealAxis(w) => w.abs(),
            Self::ImagAxis(z) => z.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Propagating,
    Evanescent,
}

/// Normal wavenumber in one layer, with its branch tag.
///
/// On the imaginary axis the stored value is the real `kappa_a > 0` and the
/// branch is always `Evanescent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerWavenumber {
    pub value: Complex64,
    pub branch: Branch,
}

/// Single- or two-interface reflection/transmission amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceAmplitudes {
    pub r_l: Complex64,
    pub t_l: Complex64,
    pub r_r: Complex64,
    pub t_r: Complex64,
    pub polarization: Polarization,
}

/// Scattering-matrix data at a real continuum frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrixPoint {
    pub t: Complex64,
    pub r: Complex64,
    /// Scattering phase, `delta = arg t`.
    pub delta: f64,
    /// Mixing angle, `theta = atan2(|r|, |t|)`.
    pub theta: f64,
    /// Largest violation of unitarity among `|t|^2 + |r|^2 = 1`,
    /// `r conj(t) + conj(r) t = 0` and `det S = t^2 - r^2 = e^{2 i delta}`.
    pub unitarity_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Dispersionless plate in vacuum.
    I,
    /// Vacuum gap between identical dispersionless half-spaces.
    II,
    /// Plasma-model slab in vacuum.
    III,
    /// Vacuum gap in plasma-model bulk.
    IV,
    Custom,
    SingleInterface,
}

impl Preset {
    pub fn label(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
            Self::Custom => "custom",
            Self::SingleInterface => "single-interface",
        }
    }
}

/// Symmetric three-layer stack `(outer | inner | outer)` with half-gap `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerConfig {
    pub outer: Medium,
    pub inner: Medium,
    /// Half-gap `a` in meters; interfaces sit at `z = -a` and `z = +a`.
    pub half_gap: f64,
    pub preset: Preset,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringError {
    Dielectric(DielectricError),
    /// Evaluation inside the pole window of a frequency-equation root; carries
    /// the denominator residual.
    Pole { residual: f64 },
    /// Frequency not in the continuum (some layer is not propagating).
    OutsideContinuum,
    /// `eps mu zeta^2/c^2 + k^2 < 0` on the imaginary axis; the medium has no
    /// admissible imaginary-axis continuation.
    NegativeImagAxisRadicand,
    /// Derivative requested at a branch point (`k_a = 0`).
    BranchPoint,
    InvalidConfig(&'static str),
}

impl fmt::Display for ScatteringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dielectric(e) => write!(f, "dielectric model: {e}"),
            Self::Pole { residual } => {
                write!(f, "evaluation at a frequency-equation pole (residual {residual:e})")
            }
            Self::OutsideContinuum => write!(f, "frequency outside the continuous spectrum"),
            Self::NegativeImagAxisRadicand => {
                write!(f, "negative imaginary-axis radicand; medium not admissible there")
            }
            Self::BranchPoint => write!(f, "derivative requested at a branch point"),
            Self::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
        }
    }
}

impl core::error::Error for ScatteringError {}

impl From<DielectricError> for ScatteringError {
    fn from(e: DielectricError) -> Self {
        Self::Dielectric(e)
    }
}

impl LayerConfig {
    pub fn custom(outer: Medium, inner: Medium, half_gap: f64) -> Result<Self, ScatteringError> {
        Self::with_preset(outer, inner, half_gap, Preset::Custom)
    }

    fn with_preset(
        outer: Medium,
        inner: Medium,
        half_gap: f64,
        preset: Preset,
    ) -> Result<Self, ScatteringError> {
        if !(half_gap > 0.0) || !half_gap.is_finite() {
            return Err(ScatteringError::InvalidConfig("half_gap must be positive and finite"));
        }
        Ok(Self { outer, inner, half_gap, preset })
    }

    /// Preset I: plate of constant `(eps2, mu2)` in vacuum.
    pub fn preset_i(eps2: f64, mu2: f64, half_gap: f64) -> Result<Self, ScatteringError> {
        let inner = Medium::new(PermittivityModel::Constant(eps2), mu2)?;
        Self::with_preset(Medium::vacuum(), inner, half_gap, Preset::I)
    }

    /// Preset II: vacuum gap between constant `(eps1, mu1)` half-spaces.
    pub fn preset_ii(eps1: f64, mu1: f64, half_gap: f64) -> Result<Self, ScatteringError> {
        let outer = Medium::new(PermittivityModel::Constant(eps1), mu1)?;
        Self::with_preset(outer, Medium::vacuum(), half_gap, Preset::II)
    }

    /// Preset III: plasma-model slab in vacuum.
    pub fn preset_iii(omega_p: f64, half_gap: f64) -> Result<Self, ScatteringError> {
        let inner = Medium::new(PermittivityModel::plasma(omega_p)?, 1.0)?;
        Self::with_preset(Medium::vacuum(), inner, half_gap, Preset::IV.complement())
    }

    /// Preset IV: vacuum slot in plasma-model bulk.
    pub fn preset_iv(omega_p: f64, half_gap: f64) -> Result<Self, ScatteringError> {
        let outer = Medium::new(PermittivityModel::plasma(omega_p)?, 1.0)?;
        Self::with_preset(outer, Medium::vacuum(), half_gap, Preset::IV)
    }

    /// Vacuum gap between identical half-spaces of the given material.
    pub fn vacuum_gap(outer: Medium, half_gap: f64) -> Result<Self, ScatteringError> {
        let preset = match &outer.permittivity {
            PermittivityModel::Plasma { .. } => Preset::IV,
            _ => Preset::Custom,
        };
        Self::with_preset(outer, Medium::vacuum(), half_gap, preset)
    }

    /// The degenerate single-interface case; `half_gap` only sets the length
    /// scale used for dimensionless reporting.
    pub fn single_interface(
        outer: Medium,
        inner: Medium,
        half_gap: f64,
    ) -> Result<Self, ScatteringError> {
        Self::with_preset(outer, inner, half_gap, Preset::SingleInterface)
    }

    /// Reference frequency for dimensionless variables: the plasma frequency
    /// when a plasma/Drude medium is present, otherwise `c / (2a)`.
    pub fn omega_ref(&self) -> f64 {
        self.outer
            .plasma_frequency()
            .or_else(|| self.inner.plasma_frequency())
            .unwrap_or(C / (2.0 * self.half_gap))
    }

    /// `k_ref = omega_ref / c`.
    pub fn k_ref(&self) -> f64 {
        self.omega_ref() / C
    }

    /// `L = 2 a k_ref`, the dimensionless gap/slab width.
    pub fn dimensionless_width(&self) -> f64 {
        2.0 * self.half_gap * self.k_ref()
    }

    pub fn has_vacuum_gap(&self) -> bool {
        self.inner.is_vacuum()
    }
}

impl Preset {
    fn complement(self) -> Preset {
        match self {
            Preset::I => Preset::II,
            Preset::II => Preset::I,
            Preset::III => Preset::IV,
            Preset::IV => Preset::III,
            other => other,
        }
    }
}

/// `eps mu` of a medium at a frequency point.
fn eps_mu(medium: &Medium, f: FrequencyPoint) -> Result<Complex64, ScatteringError> {
    match f {
        FrequencyPoint::RealAxis(w) => {
            Ok(medium.permittivity.eval_real_axis(w)? * medium.permeability)
        }
        FrequencyPoint::ImagAxis(z) => Ok(Complex64::new(
            medium.permittivity.eval_imag_axis(z)? * medium.permeability,
            0.0,
        )),
    }
}

/// Polarization weight: `eps` for TM, `mu` for TE.
fn pol_factor(
    pol: Polarization,
    medium: &Medium,
    f: FrequencyPoint,
) -> Result<Complex64, ScatteringError> {
    match pol {
        Polarization::Tm => match f {
            FrequencyPoint::RealAxis(w) => Ok(medium.permittivity.eval_real_axis(w)?),
            FrequencyPoint::ImagAxis(z) => {
                Ok(Complex64::new(medium.permittivity.eval_imag_axis(z)?, 0.0))
            }
        },
        Polarization::Te => Ok(Complex64::new(medium.permeability, 0.0)),
    }
}

/// Normal wavenumber in a layer with the branch rule applied.
pub fn layer_wavenumber(
    medium: &Medium,
    f: FrequencyPoint,
    k: f64,
) -> Result<LayerWavenumber, ScatteringError> {
    if !(k >= 0.0) {
        return Err(ScatteringError::InvalidConfig("transverse wavenumber must be >= 0"));
    }
    match f {
        FrequencyPoint::RealAxis(w) => {
            let em = eps_mu(medium, f)?;
            let radicand = em * (w / C) * (w / C) - k * k;
            // Undamped models give a real radicand up to rounding.
            if radicand.im.abs() <= 1e-12 * radicand.re.abs().max(1e-300) {
                if radicand.re >= 0.0 {
                    Ok(LayerWavenumber {
                        value: Complex64::new(radicand.re.sqrt(), 0.0),
                        branch: Branch::Propagating,
                    })
                } else {
                    Ok(LayerWavenumber {
                        value: Complex64::new(0.0, (-radicand.re).sqrt()),
                        branch: Branch::Evanescent,
                    })
                }
            } else {
                // Lossy model: principal root folded into the upper half plane.
                let mut root = radicand.sqrt();
                if root.im < 0.0 {
                    root = -root;
                }
                let branch =
                    if root.im > root.re { Branch::Evanescent } else { Branch::Propagating };
                Ok(LayerWavenumber { value: root, branch })
            }
        }
        FrequencyPoint::ImagAxis(z) => {
            let em = eps_mu(medium, f)?;
            let radicand = em.re * (z / C) * (z / C) + k * k;
            if radicand < 0.0 {
                return Err(ScatteringError::NegativeImagAxisRadicand);
            }
            Ok(LayerWavenumber {
                value: Complex64::new(radicand.sqrt(), 0.0),
                branch: Branch::Evanescent,
            })
        }
    }
}

/// Single-interface Fresnel amplitudes for the `(medium1 | medium2)` interface,
/// wave incident from medium 1.
pub fn fresnel_single(
    pol: Polarization,
    medium1: &Medium,
    medium2: &Medium,
    f: FrequencyPoint,
    k: f64,
) -> Result<InterfaceAmplitudes, ScatteringError> {
    let a1 = pol_factor(pol, medium1, f)?;
    let a2 = pol_factor(pol, medium2, f)?;
    let k1 = layer_wavenumber(medium1, f, k)?.value;
    let k2 = layer_wavenumber(medium2, f, k)?.value;
    let den = a1 * k2 + a2 * k1;
    let scale = (a1 * k2).norm() + (a2 * k1).norm();
    if den.norm() <= POLE_WINDOW * scale {
        return Err(ScatteringError::Pole { residual: den.norm() });
    }
    let r_l = (a2 * k1 - a1 * k2) / den;
    Ok(InterfaceAmplitudes {
        r_l,
        t_l: 2.0 * a1 * k1 / den,
        r_r: -r_l,
        t_r: 2.0 * a2 * k2 / den,
        polarization: pol,
    })
}

/// `exp(2 i a k2)` for one traversal of the half-gap; decaying by construction
/// on both axes.
fn half_gap_phase(config: &LayerConfig, f: FrequencyPoint, k: f64) -> Result<Complex64, ScatteringError> {
    let a = config.half_gap;
    let k2 = layer_wavenumber(&config.inner, f, k)?.value;
    match f {
        FrequencyPoint::RealAxis(_) => Ok((Complex64::new(0.0, 2.0 * a) * k2).exp()),
        // k2 = i kappa_2, so exp(2 i a k2) = exp(-2 a kappa_2).
        FrequencyPoint::ImagAxis(_) => Ok(Complex64::new((-2.0 * a * k2.re).exp(), 0.0)),
    }
}

/// Two-interface amplitudes of the symmetric stack (Airy summation with the
/// interface phase referenced to `z = -a` and `z = +a`).
pub fn two_interface_amplitudes(
    pol: Polarization,
    config: &LayerConfig,
    f: FrequencyPoint,
    k: f64,
) -> Result<InterfaceAmplitudes, ScatteringError> {
    let single = fresnel_single(pol, &config.outer, &config.inner, f, k)?;
    let r12 = single.r_l;
    let ph = half_gap_phase(config, f, k)?;
    let ph2 = ph * ph;
    let d = Complex64::new(1.0, 0.0) - r12 * r12 * ph2;
    if d.norm() <= POLE_WINDOW {
        return Err(ScatteringError::Pole { residual: d.norm() });
    }
    let r = r12 * (Complex64::new(1.0, 0.0) - ph2) / d;
    let t = single.t_l * single.t_r * ph / d;
    Ok(InterfaceAmplitudes { r_l: r, t_l: t, r_r: r, t_r: t, polarization: pol })
}

/// The dispersion function `D`.
///
/// Real axis: `D = 1 - r12^2 exp(4 i a k2)`; its real zeros are the discrete
/// eigenfrequencies. Imaginary axis: `D = 1 - r^2 exp(-4 a kappa_2)`, real and
/// in `(0, 1]` for positive `eps(i zeta)`.
pub fn dispersion_function(
    pol: Polarization,
    config: &LayerConfig,
    f: FrequencyPoint,
    k: f64,
) -> Result<Complex64, ScatteringError> {
    let single = fresnel_single(pol, &config.outer, &config.inner, f, k)?;
    let ph = half_gap_phase(config, f, k)?;
    Ok(Complex64::new(1.0, 0.0) - single.r_l * single.r_l * ph * ph)
}

/// `D` together with its frequency and gap-width derivatives (gap = `2a`).
///
/// Used by the spectral-shift machinery: the discrete-root derivative follows
/// by implicit differentiation and the continuum density from `d ln D / dw`.
pub struct DispersionDerivatives {
    pub d: Complex64,
    pub d_domega: Complex64,
    pub d_dgap: Complex64,
}

pub fn dispersion_derivatives(
    pol: Polarization,
    config: &LayerConfig,
    omega: f64,
    k: f64,
) -> Result<DispersionDerivatives, ScatteringError> {
    let f = FrequencyPoint::RealAxis(omega);
    let a1 = pol_factor(pol, &config.outer, f)?;
    let a2 = pol_factor(pol, &config.inner, f)?;
    let k1 = layer_wavenumber(&config.outer, f, k)?.value;
    let k2 = layer_wavenumber(&config.inner, f, k)?.value;
    let kp = config.k_ref();
    if k1.norm() <= 1e-9 * kp || k2.norm() <= 1e-9 * kp {
        return Err(ScatteringError::BranchPoint);
    }
    // d(k_a^2)/dw = mu (eps' w^2 + 2 eps w) / c^2; dk_a/dw = that / (2 k_a).
    let deriv_k = |medium: &Medium, kk: Complex64| -> Result<Complex64, ScatteringError> {
        let eps = medium.permittivity.eval_real_axis(omega)?;
        let deps = medium.permittivity.deriv_real_axis(omega)?;
        let dk2 = medium.permeability * (deps * omega * omega + 2.0 * eps * omega) / (C * C);
        Ok(dk2 / (2.0 * kk))
    };
    let dk1 = deriv_k(&config.outer, k1)?;
    let dk2 = deriv_k(&config.inner, k2)?;
    let da1 = match pol {
        Polarization::Tm => config.outer.permittivity.deriv_real_axis(omega)?,
        Polarization::Te => Complex64::new(0.0, 0.0),
    };
    let da2 = match pol {
        Polarization::Tm => config.inner.permittivity.deriv_real_axis(omega)?,
        Polarization::Te => Complex64::new(0.0, 0.0),
    };
    let num = a2 * k1 - a1 * k2;
    let den = a2 * k1 + a1 * k2;
    if den.norm() <= POLE_WINDOW * ((a2 * k1).norm() + (a1 * k2).norm()) {
        return Err(ScatteringError::Pole { residual: den.norm() });
    }
    let r = num / den;
    let dnum = da2 * k1 + a2 * dk1 - da1 * k2 - a1 * dk2;
    let dden = da2 * k1 + a2 * dk1 + da1 * k2 + a1 * dk2;
    let dr = (dnum * den - num * dden) / (den * den);
    let gap = 2.0 * config.half_gap;
    let e = (Complex64::new(0.0, gap) * k2).exp(); // exp(2 i a k2) with 2a = gap
    let ee = e * e; // exp(4 i a k2)
    let d = Complex64::new(1.0, 0.0) - r * r * ee;
    let i = Complex64::new(0.0, 1.0);
    let d_domega = -ee * (2.0 * r * dr + r * r * 2.0 * i * gap * dk2);
    let d_dgap = -2.0 * i * k2 * r * r * ee;
    Ok(DispersionDerivatives { d, d_domega, d_dgap })
}

/// Scattering matrix at a real continuum frequency (both layers propagating).
pub fn s_matrix(
    pol: Polarization,
    config: &LayerConfig,
    omega: f64,
    k: f64,
) -> Result<SMatrixPoint, ScatteringError> {
    let f = FrequencyPoint::RealAxis(omega);
    let w1 = layer_wavenumber(&config.outer, f, k)?;
    let w2 = layer_wavenumber(&config.inner, f, k)?;
    if w1.branch != Branch::Propagating
        || w2.branch != Branch::Propagating
        || w1.value.re == 0.0
        || w2.value.re == 0.0
    {
        return Err(ScatteringError::OutsideContinuum);
    }
    let amps = two_interface_amplitudes(pol, config, f, k)?;
    let (t, r) = (amps.t_l, amps.r_l);
    let delta = t.im.atan2(t.re);
    let theta = r.norm().atan2(t.norm());
    let d1 = (t.norm_sqr() + r.norm_sqr() - 1.0).abs();
    let d2 = (r * t.conj() + r.conj() * t).norm();
    let det = t * t - r * r;
    let d3 = (det.norm() - 1.0).abs();
    let d4 = (det - (Complex64::new(0.0, 2.0 * delta)).exp()).norm();
    Ok(SMatrixPoint { t, r, delta, theta, unitarity_defect: d1.max(d2).max(d3).max(d4) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn vacuum() -> Medium {
        Medium::vacuum()
    }

    #[test]
    fn wavenumber_branches() {
        let k = 1.0e7;
        // omega = 2 c k: propagating, k_z = sqrt(3) k.
        let lw = layer_wavenumber(&vacuum(), FrequencyPoint::RealAxis(2.0 * C * k), k).unwrap();
        assert_eq!(lw.branch, Branch::Propagating);
        assert_relative_eq!(lw.value.re, 3.0_f64.sqrt() * k, max_relative = 1e-14);
        // omega = c k / 2: evanescent, k_z = +i (sqrt(3)/2) k.
        let lw = layer_wavenumber(&vacuum(), FrequencyPoint::RealAxis(0.5 * C * k), k).unwrap();
        assert_eq!(lw.branch, Branch::Evanescent);
        assert_eq!(lw.value.re, 0.0);
        assert_relative_eq!(lw.value.im, 0.5 * 3.0_f64.sqrt() * k, max_relative = 1e-14);
        // Light line: k_z = 0.
        let lw = layer_wavenumber(&vacuum(), FrequencyPoint::RealAxis(C * k), k).unwrap();
        assert_abs_diff_eq!(lw.value.norm(), 0.0, epsilon = 1e-6 * k);
    }

    #[test]
    fn imag_axis_matches_analytic_continuation() {
        // kappa(zeta, k) = sqrt(eps(i zeta) zeta^2 / c^2 + k^2) at random points.
        let wp = 1.38e16;
        let m = Medium::new(PermittivityModel::plasma(wp).unwrap(), 1.0).unwrap();
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let zeta = wp * (0.1 + 3.0 * next());
            let k = (wp / C) * (0.1 + 3.0 * next());
            let lw = layer_wavenumber(&m, FrequencyPoint::ImagAxis(zeta), k).unwrap();
            let eps = m.permittivity.eval_imag_axis(zeta).unwrap();
            let expect = (eps * zeta * zeta / (C * C) + k * k).sqrt();
            assert_relative_eq!(lw.value.re, expect, max_relative = 1e-13);
            assert_eq!(lw.value.im, 0.0);
        }
    }

    #[test]
    fn fresnel_identical_media() {
        let m = Medium::new(PermittivityModel::Constant(2.25), 1.0).unwrap();
        let amps =
            fresnel_single(Polarization::Tm, &m, &m, FrequencyPoint::RealAxis(1e15), 1e6).unwrap();
        assert_abs_diff_eq!(amps.r_l.norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(amps.t_l.re, 1.0, max_relative = 1e-14);
        assert_eq!(amps.r_r, -amps.r_l);
    }

    #[test]
    fn fresnel_normal_incidence() {
        // k = 0, mu = 1: r_TE = -r_TM = (sqrt(e1) - sqrt(e2)) / (sqrt(e1) + sqrt(e2)).
        let e1 = 2.25;
        let e2 = 4.0;
        let m1 = Medium::new(PermittivityModel::Constant(e1), 1.0).unwrap();
        let m2 = Medium::new(PermittivityModel::Constant(e2), 1.0).unwrap();
        let f = FrequencyPoint::RealAxis(1e15);
        let expect = (e1.sqrt() - e2.sqrt()) / (e1.sqrt() + e2.sqrt());
        let te = fresnel_single(Polarization::Te, &m1, &m2, f, 0.0).unwrap();
        let tm = fresnel_single(Polarization::Tm, &m1, &m2, f, 0.0).unwrap();
        assert_relative_eq!(te.r_l.re, expect, max_relative = 1e-13);
        assert_relative_eq!(tm.r_l.re, -expect, max_relative = 1e-13);
    }

    #[test]
    fn fresnel_reciprocity() {
        // t12 t21 = 1 - r12^2 for mu1 = mu2 = 1.
        let m1 = Medium::new(PermittivityModel::Constant(1.0), 1.0).unwrap();
        let m2 = Medium::new(PermittivityModel::plasma(1.3e16).unwrap(), 1.0).unwrap();
        for (w, k) in [(2.0e16, 1e7), (3.0e16, 4e7), (1.5e16, 2e6)] {
            for pol in Polarization::BOTH {
                let a = fresnel_single(pol, &m1, &m2, FrequencyPoint::RealAxis(w), k).unwrap();
                let lhs = a.t_l * a.t_r;
                let rhs = Complex64::new(1.0, 0.0) - a.r_l * a.r_l;
                assert!((lhs - rhs).norm() <= 1e-12, "reciprocity violated: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn two_interface_trivial_and_unitary() {
        let cfg = LayerConfig::custom(vacuum(), vacuum(), 50e-9).unwrap();
        let amps = two_interface_amplitudes(
            Polarization::Tm,
            &cfg,
            FrequencyPoint::RealAxis(3.0e15),
            1e6,
        )
        .unwrap();
        assert_abs_diff_eq!(amps.r_l.norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(amps.t_l.norm(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn s_matrix_unitarity_grid() {
        let wp = 1.38e16;
        let cfg = LayerConfig::preset_iii(wp, 0.315 * C / wp).unwrap();
        let kp = wp / C;
        let mut worst = 0.0_f64;
        for i in 0..32 {
            let q = 0.05 + 3.0 * i as f64 / 31.0;
            for j in 0..32 {
                // Both layers propagate above omega_plus = sqrt(c^2 k^2 + wp^2).
                let omega_plus = libm::hypot(C * q * kp, wp);
                let omega = omega_plus * (1.001 + 3.0 * j as f64 / 31.0);
                for pol in Polarization::BOTH {
                    let s = s_matrix(pol, &cfg, omega, q * kp).unwrap();
                    worst = worst.max(s.unitarity_defect);
                }
            }
        }
        assert!(worst <= 1e-12, "unitarity defect {worst}");
    }

    #[test]
    fn s_matrix_outside_continuum_rejected() {
        let wp = 1.38e16;
        let cfg = LayerConfig::preset_iii(wp, 0.315 * C / wp).unwrap();
        let kp = wp / C;
        let err = s_matrix(Polarization::Tm, &cfg, 0.5 * C * kp, kp).unwrap_err();
        assert_eq!(err, ScatteringError::OutsideContinuum);
    }

    #[test]
    fn imag_axis_dispersion_in_unit_interval() {
        let wp = 1.38e16;
        for cfg in [
            LayerConfig::preset_iii(wp, 0.315 * C / wp).unwrap(),
            LayerConfig::preset_iv(wp, 3.15 * C / wp).unwrap(),
        ] {
            let kp = wp / C;
            for i in 0..40 {
                let zeta = wp * libm::pow(10.0, -2.0 + 4.0 * i as f64 / 39.0);
                for j in 0..40 {
                    let k = kp * libm::pow(10.0, -2.0 + 4.0 * j as f64 / 39.0);
                    for pol in Polarization::BOTH {
                        let d = dispersion_function(pol, &cfg, FrequencyPoint::ImagAxis(zeta), k)
                            .unwrap();
                        assert_eq!(d.im, 0.0);
                        assert!(d.re > 0.0 && d.re <= 1.0, "D = {} out of (0,1]", d.re);
                    }
                }
            }
        }
    }

    #[test]
    fn dispersion_vanishing_gap_limit() {
        // a -> infinity on the imaginary axis: D -> 1.
        let wp = 1.38e16;
        let cfg = LayerConfig::preset_iv(wp, 1.0e-3).unwrap();
        let d = dispersion_function(
            Polarization::Tm,
            &cfg,
            FrequencyPoint::ImagAxis(0.5 * wp),
            0.5 * wp / C,
        )
        .unwrap();
        assert_relative_eq!(d.re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn derivative_consistency() {
        // Analytic dD/dw and dD/dgap against centered differences.
        let wp = 1.38e16;
        let cfg = LayerConfig::preset_iv(wp, 3.15 * C / wp).unwrap();
        let kp = wp / C;
        let k = 0.5 * kp;
        let omega = 0.35 * wp; // surface-mode region, away from roots
        let dd = dispersion_derivatives(Polarization::Tm, &cfg, omega, k).unwrap();
        let h = omega * 1e-6;
        let dp = dispersion_function(Polarization::Tm, &cfg, FrequencyPoint::RealAxis(omega + h), k)
            .unwrap();
        let dm = dispersion_function(Polarization::Tm, &cfg, FrequencyPoint::RealAxis(omega - h), k)
            .unwrap();
        let fd = (dp - dm) / (2.0 * h);
        assert!((dd.d_domega - fd).norm() <= 1e-6 * fd.norm().max(1e-30));
        let ha = cfg.half_gap * 1e-6;
        let cfg_p = LayerConfig::preset_iv(wp, cfg.half_gap + ha).unwrap();
        let cfg_m = LayerConfig::preset_iv(wp, cfg.half_gap - ha).unwrap();
        let dp = dispersion_function(Polarization::Tm, &cfg_p, FrequencyPoint::RealAxis(omega), k)
            .unwrap();
        let dm = dispersion_function(Polarization::Tm, &cfg_m, FrequencyPoint::RealAxis(omega), k)
            .unwrap();
        let fd = (dp - dm) / (2.0 * 2.0 * ha); // gap step is 2 * ha
        assert!((dd.d_dgap - fd).norm() <= 1e-6 * fd.norm().max(1e-30));
    }
}
