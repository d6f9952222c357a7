//! Frequency-dependent permittivity models and media.
//!
//! Models are evaluated on the real frequency axis, `eps(omega)`, and on the
//! imaginary axis, `eps(i zeta)`, which is where the Lifshitz integrand lives.
//! All frequencies are angular (rad/s); permittivities are dimensionless.

use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float as _;

/// Unit convention for the plasma-frequency constructor.
///
/// The textbook definition `omega_p^2 = 4 pi n e^2 / m` is Gaussian; the SI
/// equivalent is `omega_p^2 = n e^2 / (eps_0 m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitConvention {
    Gaussian,
    Si,
}

/// One resonance of the oscillator model: strength, eigenfrequency, damping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorTerm {
    /// Oscillator strength `S_j` (> 0, dimensionless).
    pub strength: f64,
    /// Resonance frequency `omega_j` (rad/s, > 0).
    pub omega: f64,
    /// Relaxation parameter `Gamma_j` (rad/s, >= 0).
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DielectricError {
    /// Electron density must be non-negative.
    NegativeDensity,
    /// Plasma/Drude permittivity has a pole at omega = 0.
    PoleAtZeroFrequency,
    /// Evaluation frequency must be strictly positive.
    NonPositiveFrequency,
    /// Model parameter out of its admissible range.
    InvalidParameter(&'static str),
    /// Evaluation hit a resonance denominator of an undamped oscillator.
    OscillatorResonance { omega: f64 },
    /// A tabulated model carries `eps(i zeta)` data only.
    RealAxisUnsupported,
    /// Query outside the tabulated range and no high-frequency tail configured.
    OutOfTableRange { zeta: f64, lo: f64, hi: f64 },
    /// Text ingestion failure, with the 1-based offending line.
    Ingestion { line: usize, reason: IngestionReason },
}

#[derive(Debug, Clone, PartialEq)]
pub enum IngestionReason {
    Parse,
    WrongColumnCount,
    NonMonotoneAbscissa,
    NonPositivePermittivity,
    TooFewSamples,
}

impl fmt::Display for DielectricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeDensity => write!(f, "electron density must be non-negative"),
            Self::PoleAtZeroFrequency => write!(f, "permittivity pole at omega = 0"),
            Self::NonPositiveFrequency => write!(f, "frequency must be strictly positive"),
            Self::InvalidParameter(what) => write!(f, "invalid model parameter: {what}"),
            Self::OscillatorResonance { omega } => {
                write!(f, "undamped oscillator resonance at omega = {omega:e} rad/s")
            }
            Self::RealAxisUnsupported => {
                write!(f, "tabulated permittivity is defined on the imaginary axis only")
            }
            Self::OutOfTableRange { zeta, lo, hi } => write!(
                f,
                "zeta = {zeta:e} outside tabulated range [{lo:e}, {hi:e}] and no tail configured"
            ),
            Self::Ingestion { line, reason } => {
                let what = match reason {
                    IngestionReason::Parse => "unparsable number",
                    IngestionReason::WrongColumnCount => "expected two columns",
                    IngestionReason::NonMonotoneAbscissa => "non-monotone abscissa",
                    IngestionReason::NonPositivePermittivity => "non-positive permittivity",
                    IngestionReason::TooFewSamples => "need at least two samples",
                };
                write!(f, "{what} at line {line}")
            }
        }
    }
}

impl core::error::Error for DielectricError {}

/// Tabulated `eps(i zeta)` with monotone cubic (Fritsch-Carlson) interpolation.
///
/// Monotone interpolation cannot overshoot below the sample ordinates, so the
/// positivity the Lifshitz integrand relies on survives interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPermittivity {
    zeta: Vec<f64>,
    eps: Vec<f64>,
    slopes: Vec<f64>,
    /// Tail coefficient `C` in `eps -> 1 + C / zeta^2`, if enabled.
    tail: Option<f64>,
}

impl TabulatedPermittivity {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self, DielectricError> {
        if samples.len() < 2 {
            return Err(DielectricError::InvalidParameter("need at least two samples"));
        }
        let mut zeta = Vec::with_capacity(samples.len());
        let mut eps = Vec::with_capacity(samples.len());
        for &(z, e) in samples {
            if let Some(&prev) = zeta.last() {
                if z <= prev {
                    return Err(DielectricError::InvalidParameter(
                        "abscissas must be strictly increasing",
                    ));
                }
            }
            if !(z > 0.0) || !z.is_finite() {
                return Err(DielectricError::InvalidParameter("abscissas must be positive"));
            }
            if !(e > 0.0) || !e.is_finite() {
                return Err(DielectricError::InvalidParameter("ordinates must be positive"));
            }
            zeta.push(z);
            eps.push(e);
        }
        let slopes = fritsch_carlson_slopes(&zeta, &eps);
        Ok(Self { zeta, eps, slopes, tail: None })
    }

    /// Enable the `eps -> 1 + C / zeta^2` extrapolation above the last sample,
    /// with `C` fitted to the last sample.
    pub fn with_high_frequency_tail(mut self) -> Self {
        let last = self.zeta.len() - 1;
        self.tail = Some((self.eps[last] - 1.0) * self.zeta[last] * self.zeta[last]);
        self
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.zeta.iter().copied().zip(self.eps.iter().copied())
    }

    fn eval(&self, zeta: f64) -> Result<f64, DielectricError> {
        let n = self.zeta.len();
        if zeta < self.zeta[0] {
            return Err(DielectricError::OutOfTableRange {
                zeta,
                lo: self.zeta[0],
                hi: self.zeta[n - 1],
            });
        }
        if zeta > self.zeta[n - 1] {
            return match self.tail {
                Some(c) => Ok(1.0 + c / (zeta * zeta)),
                None => Err(DielectricError::OutOfTableRange {
                    zeta,
                    lo: self.zeta[0],
                    hi: self.zeta[n - 1],
                }),
            };
        }
        // Binary search for the bracketing interval.
        let i = match self.zeta.binary_search_by(|z| z.partial_cmp(&zeta).unwrap()) {
            Ok(i) => return Ok(self.eps[i]),
            Err(i) => i - 1,
        };
        let h = self.zeta[i + 1] - self.zeta[i];
        let t = (zeta - self.zeta[i]) / h;
        let (y0, y1) = (self.eps[i], self.eps[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        Ok(y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2))
    }
}

/// Fritsch-Carlson limited slopes guaranteeing a monotone cubic interpolant.
fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        d.push((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
    }
    let mut m = Vec::with_capacity(n);
    m.push(d[0]);
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m.push(0.0);
        } else {
            m.push(0.5 * (d[i - 1] + d[i]));
        }
    }
    m.push(d[n - 2]);
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let alpha = m[i] / d[i];
        let beta = m[i + 1] / d[i];
        let s = alpha * alpha + beta * beta;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[i] = tau * alpha * d[i];
            m[i + 1] = tau * beta * d[i];
        }
    }
    m
}

/// Frequency-dependent dielectric permittivity.
#[derive(Debug, Clone, PartialEq)]
pub enum PermittivityModel {
    /// Dispersionless `eps`; may be negative (left-handed media studies).
    Constant(f64),
    /// `eps = 1 - omega_p^2 / omega^2`.
    Plasma { omega_p: f64 },
    /// `eps = 1 - omega_p^2 / (omega (omega + i gamma))`.
    Drude { omega_p: f64, gamma: f64 },
    /// `eps = eps_inf + sum_j S_j omega_j^2 / (omega_j^2 - omega^2 - i Gamma_j omega)`.
    Oscillator { eps_inf: f64, terms: Vec<OscillatorTerm> },
    /// Sampled `eps(i zeta)`.
    Tabulated(TabulatedPermittivity),
}

impl PermittivityModel {
    pub fn plasma(omega_p: f64) -> Result<Self, DielectricError> {
        if !(omega_p > 0.0) {
            return Err(DielectricError::InvalidParameter("omega_p must be positive"));
        }
        Ok(Self::Plasma { omega_p })
    }

    pub fn drude(omega_p: f64, gamma: f64) -> Result<Self, DielectricError> {
        if !(omega_p > 0.0) {
            return Err(DielectricError::InvalidParameter("omega_p must be positive"));
        }
        if !(gamma >= 0.0) {
            return Err(DielectricError::InvalidParameter("gamma must be non-negative"));
        }
        Ok(Self::Drude { omega_p, gamma })
    }

    pub fn oscillator(eps_inf: f64, terms: Vec<OscillatorTerm>) -> Result<Self, DielectricError> {
        if !(eps_inf >= 1.0) {
            return Err(DielectricError::InvalidParameter("eps_inf must be >= 1"));
        }
        for t in &terms {
            if !(t.strength > 0.0) || !(t.omega > 0.0) || !(t.gamma >= 0.0) {
                return Err(DielectricError::InvalidParameter("bad oscillator term"));
            }
        }
        Ok(Self::Oscillator { eps_inf, terms })
    }

    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self, DielectricError> {
        TabulatedPermittivity::new(samples).map(Self::Tabulated)
    }

    /// `eps(omega)` on the real axis, `omega > 0`.
    pub fn eval_real_axis(&self, omega: f64) -> Result<Complex64, DielectricError> {
        if !(omega > 0.0) {
            return match self {
                Self::Plasma { .. } | Self::Drude { .. } if omega == 0.0 => {
                    Err(DielectricError::PoleAtZeroFrequency)
                }
                _ => Err(DielectricError::NonPositiveFrequency),
            };
        }
        match self {
            Self::Constant(e) => Ok(Complex64::new(*e, 0.0)),
            Self::Plasma { omega_p } => {
                Ok(Complex64::new(1.0 - (omega_p / omega) * (omega_p / omega), 0.0))
            }
            Self::Drude { omega_p, gamma } => {
                let den = omega * Complex64::new(omega, *gamma);
                Ok(Complex64::new(1.0, 0.0) - omega_p * omega_p / den)
            }
            Self::Oscillator { eps_inf, terms } => {
                let mut eps = Complex64::new(*eps_inf, 0.0);
                for t in terms {
                    let den =
                        Complex64::new(t.omega * t.omega - omega * omega, -t.gamma * omega);
                    if den.norm_sqr() == 0.0 {
                        return Err(DielectricError::OscillatorResonance { omega });
                    }
                    eps += t.strength * t.omega * t.omega / den;
                }
                Ok(eps)
            }
            Self::Tabulated(_) => Err(DielectricError::RealAxisUnsupported),
        }
    }

    /// `d eps / d omega` on the real axis; used by the spectral-shift machinery.
    pub fn deriv_real_axis(&self, omega: f64) -> Result<Complex64, DielectricError> {
        if !(omega > 0.0) {
            return Err(DielectricError::NonPositiveFrequency);
        }
        match self {
            Self::Constant(_) => Ok(Complex64::new(0.0, 0.0)),
            Self::Plasma { omega_p } => {
                Ok(Complex64::new(2.0 * omega_p * omega_p / (omega * omega * omega), 0.0))
            }
            Self::Drude { omega_p, gamma } => {
                // d/dw [-wp^2 / (w(w + ig))] = wp^2 (2w + ig) / (w(w + ig))^2
                let den = omega * Complex64::new(omega, *gamma);
                Ok(omega_p * omega_p * Complex64::new(2.0 * omega, *gamma) / (den * den))
            }
            Self::Oscillator { terms, .. } => {
                let mut d = Complex64::new(0.0, 0.0);
                for t in terms {
                    let den =
                        Complex64::new(t.omega * t.omega - omega * omega, -t.gamma * omega);
                    if den.norm_sqr() == 0.0 {
                        return Err(DielectricError::OscillatorResonance { omega });
                    }
                    d += t.strength * t.omega * t.omega * Complex64::new(2.0 * omega, t.gamma)
                        / (den * den);
                }
                Ok(d)
            }
            Self::Tabulated(_) => Err(DielectricError::RealAxisUnsupported),
        }
    }

    /// `eps(i zeta)` on the imaginary axis, `zeta > 0`; always real.
    ///
    /// Oscillator damping is ignored here (undamped form); see
    /// [`Self::eval_imag_axis_damped`] for the opt-in damped evaluation.
    pub fn eval_imag_axis(&self, zeta: f64) -> Result<f64, DielectricError> {
        self.eval_imag_axis_inner(zeta, false)
    }

    /// `eps(i zeta)` keeping the oscillator relaxation terms.
    pub fn eval_imag_axis_damped(&self, zeta: f64) -> Result<f64, DielectricError> {
        self.eval_imag_axis_inner(zeta, true)
    }

    fn eval_imag_axis_inner(&self, zeta: f64, damped: bool) -> Result<f64, DielectricError> {
        if !(zeta > 0.0) {
            return Err(DielectricError::NonPositiveFrequency);
        }
        match self {
            Self::Constant(e) => Ok(*e),
            Self::Plasma { omega_p } => Ok(1.0 + (omega_p / zeta) * (omega_p / zeta)),
            Self::Drude { omega_p, gamma } => Ok(1.0 + omega_p * omega_p / (zeta * (zeta + gamma))),
            Self::Oscillator { eps_inf, terms } => {
                let mut eps = *eps_inf;
                for t in terms {
                    let mut den = t.omega * t.omega + zeta * zeta;
                    if damped {
                        den += t.gamma * zeta;
                    }
                    eps += t.strength * t.omega * t.omega / den;
                }
                Ok(eps)
            }
            Self::Tabulated(tab) => tab.eval(zeta),
        }
    }
}

/// Plasma frequency from the mean electron density,
/// `omega_p^2 = n e^2 / (eps_0 m_e)`.
pub fn plasma_frequency_from_density(
    n: f64,
    e: f64,
    m: f64,
    convention: UnitConvention,
) -> Result<f64, DielectricError> {
    if n < 0.0 {
        return Err(DielectricError::NegativeDensity);
    }
    if !(e > 0.0) || !(m > 0.0) {
        return Err(DielectricError::InvalidParameter("charge and mass must be positive"));
    }
    let w2 = match convention {
        UnitConvention::Gaussian => 4.0 * core::f64::consts::PI * n * e * e / m,
        UnitConvention::Si => n * e * e / (crate::consts::EPSILON_0 * m),
    };
    Ok(w2.sqrt())
}

/// Ingest a two-column `zeta, eps(i zeta)` table from delimited text.
///
/// `#` starts a comment; columns may be separated by whitespace or commas.
pub fn ingest_tabulated(text: &str) -> Result<PermittivityModel, DielectricError> {
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut fields = content.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
        let (first, second) = match (fields.next(), fields.next()) {
            (None, _) => continue, // blank or comment-only line
            (Some(a), Some(b)) => (a, b),
            (Some(_), None) => {
                return Err(DielectricError::Ingestion {
                    line: line_no,
                    reason: IngestionReason::WrongColumnCount,
                })
            }
        };
        if fields.next().is_some() {
            return Err(DielectricError::Ingestion {
                line: line_no,
                reason: IngestionReason::WrongColumnCount,
            });
        }
        let parse = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
        let (z, e) = match (parse(first), parse(second)) {
            (Some(z), Some(e)) => (z, e),
            _ => {
                return Err(DielectricError::Ingestion {
                    line: line_no,
                    reason: IngestionReason::Parse,
                })
            }
        };
        if let Some(&(prev, _)) = samples.last() {
            if z <= prev {
                return Err(DielectricError::Ingestion {
                    line: line_no,
                    reason: IngestionReason::NonMonotoneAbscissa,
                });
            }
        }
        if e <= 0.0 {
            return Err(DielectricError::Ingestion {
                line: line_no,
                reason: IngestionReason::NonPositivePermittivity,
            });
        }
        samples.push((z, e));
    }
    if samples.len() < 2 {
        return Err(DielectricError::Ingestion {
            line: samples.len() + 1,
            reason: IngestionReason::TooFewSamples,
        });
    }
    PermittivityModel::tabulated(&samples)
}

/// A material: permittivity model plus a constant permeability.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    pub permittivity: PermittivityModel,
    /// Constant relative permeability; may be negative for left-handed media.
    pub permeability: f64,
}

impl Medium {
    pub fn new(permittivity: PermittivityModel, permeability: f64) -> Result<Self, DielectricError> {
        if !permeability.is_finite() || permeability == 0.0 {
            return Err(DielectricError::InvalidParameter("permeability must be finite and nonzero"));
        }
        Ok(Self { permittivity, permeability })
    }

    pub fn vacuum() -> Self {
        Self { permittivity: PermittivityModel::Constant(1.0), permeability: 1.0 }
    }

    pub fn is_vacuum(&self) -> bool {
        self.permeability == 1.0 && self.permittivity == PermittivityModel::Constant(1.0)
    }

    /// Plasma frequency of the permittivity model, if it has one.
    pub fn plasma_frequency(&self) -> Option<f64> {
        match &self.permittivity {
            PermittivityModel::Plasma { omega_p } | PermittivityModel::Drude { omega_p, .. } => {
                Some(*omega_p)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn plasma_frequency_zero_density() {
        let w = plasma_frequency_from_density(
            0.0,
            consts::ELEMENTARY_CHARGE,
            consts::ELECTRON_MASS,
            UnitConvention::Si,
        )
        .unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn plasma_frequency_inverse_construction_gaussian() {
        // n = m / (4 pi e^2) gives omega_p = 1 s^-1 in Gaussian units.
        let e = 2.0;
        let m = 3.0;
        let n = m / (4.0 * core::f64::consts::PI * e * e);
        let w = plasma_frequency_from_density(n, e, m, UnitConvention::Gaussian).unwrap();
        assert_relative_eq!(w, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn plasma_frequency_gold() {
        // Free-electron density of gold; the literature value is 1.38e16 s^-1.
        let w = plasma_frequency_from_density(
            5.9e28,
            consts::ELEMENTARY_CHARGE,
            consts::ELECTRON_MASS,
            UnitConvention::Si,
        )
        .unwrap();
        assert_relative_eq!(w, 1.37e16, max_relative = 5e-3);
        assert_relative_eq!(w, 1.38e16, max_relative = 1e-2);
    }

    #[test]
    fn plasma_frequency_negative_density_rejected() {
        let err = plasma_frequency_from_density(-1.0, 1.0, 1.0, UnitConvention::Si).unwrap_err();
        assert_eq!(err, DielectricError::NegativeDensity);
    }

    #[test]
    fn plasma_real_axis_zeros() {
        let wp = 2.7e15;
        let m = PermittivityModel::plasma(wp).unwrap();
        let at_wp = m.eval_real_axis(wp).unwrap();
        assert_abs_diff_eq!(at_wp.re, 0.0, epsilon = 1e-14);
        // Surface-plasma condition eps = -1 at omega_p / sqrt(2).
        let at_sp = m.eval_real_axis(wp / 2.0_f64.sqrt()).unwrap();
        assert_relative_eq!(at_sp.re, -1.0, max_relative = 1e-12);
        assert_eq!(at_sp.im, 0.0);
        assert_eq!(m.eval_real_axis(0.0).unwrap_err(), DielectricError::PoleAtZeroFrequency);
    }

    #[test]
    fn drude_gamma_zero_equals_plasma() {
        let wp = 1.0e16;
        let p = PermittivityModel::plasma(wp).unwrap();
        let d = PermittivityModel::drude(wp, 0.0).unwrap();
        for i in 1..40 {
            let w = wp * (0.05 * i as f64);
            let ep = p.eval_real_axis(w).unwrap();
            let ed = d.eval_real_axis(w).unwrap();
            assert_relative_eq!(ep.re, ed.re, max_relative = 1e-14);
            assert_abs_diff_eq!(ed.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn oscillator_high_frequency_limit() {
        let m = PermittivityModel::oscillator(
            2.0,
            alloc::vec![OscillatorTerm { strength: 1.5, omega: 1.0e15, gamma: 0.0 }],
        )
        .unwrap();
        let e = m.eval_real_axis(1.0e22).unwrap();
        assert_relative_eq!(e.re, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn imag_axis_values() {
        let wp = 3.0e15;
        let p = PermittivityModel::plasma(wp).unwrap();
        assert_relative_eq!(p.eval_imag_axis(wp).unwrap(), 2.0, max_relative = 1e-14);
        let d = PermittivityModel::drude(wp, 0.1 * wp).unwrap();
        assert_relative_eq!(d.eval_imag_axis(wp).unwrap(), 1.0 + 1.0 / 1.1, max_relative = 1e-14);
    }

    #[test]
    fn imag_axis_monotone_decreasing_to_one() {
        let wp = 1.38e16;
        for m in [
            PermittivityModel::plasma(wp).unwrap(),
            PermittivityModel::drude(wp, 0.004 * wp).unwrap(),
        ] {
            let mut prev = f64::INFINITY;
            for i in 0..120 {
                let zeta = wp * libm::pow(10.0, -3.0 + 6.0 * i as f64 / 119.0);
                let e = m.eval_imag_axis(zeta).unwrap();
                assert!(e >= 1.0);
                assert!(e < prev, "eps(i zeta) must decrease");
                prev = e;
            }
            assert_relative_eq!(m.eval_imag_axis(1e6 * wp).unwrap(), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn drude_to_plasma_bound() {
        let wp = 1.0e16;
        let p = PermittivityModel::plasma(wp).unwrap();
        for gamma_frac in [1e-2, 1e-4, 1e-6] {
            let d = PermittivityModel::drude(wp, gamma_frac * wp).unwrap();
            for i in 1..60 {
                let zeta = wp * libm::pow(10.0, -2.0 + 4.0 * i as f64 / 59.0);
                let diff = (d.eval_imag_axis(zeta).unwrap() - p.eval_imag_axis(zeta).unwrap()).abs();
                let bound = gamma_frac * wp * wp * wp / (zeta * zeta * zeta);
                // Slack for cancellation in the O(1) subtraction above.
                assert!(diff <= bound + 8.0 * f64::EPSILON, "diff {diff} bound {bound}");
            }
        }
    }

    #[test]
    fn tabulated_interpolation_identity_and_monotonicity() {
        let wp = 1.38e16_f64;
        let plasma = PermittivityModel::plasma(wp).unwrap();
        let samples: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let z = wp * libm::pow(10.0, -2.0 + 4.0 * i as f64 / 39.0);
                (z, plasma.eval_imag_axis(z).unwrap())
            })
            .collect();
        let tab = PermittivityModel::tabulated(&samples).unwrap();
        for &(z, e) in &samples {
            assert_relative_eq!(tab.eval_imag_axis(z).unwrap(), e, max_relative = 1e-14);
        }
        // Interpolated values never dip below 1 on a fine grid.
        for i in 0..400 {
            let z = wp * libm::pow(10.0, -2.0 + 4.0 * i as f64 / 399.0);
            assert!(tab.eval_imag_axis(z).unwrap() >= 1.0);
        }
    }

    #[test]
    fn tabulated_out_of_range_and_tail() {
        let tab = PermittivityModel::tabulated(&[(1.0, 3.0), (2.0, 2.0)]).unwrap();
        assert!(matches!(
            tab.eval_imag_axis(3.0).unwrap_err(),
            DielectricError::OutOfTableRange { .. }
        ));
        let with_tail = match tab {
            PermittivityModel::Tabulated(t) => {
                PermittivityModel::Tabulated(t.with_high_frequency_tail())
            }
            _ => unreachable!(),
        };
        // C = (2 - 1) * 4 = 4, so eps(4) = 1 + 4/16.
        assert_relative_eq!(with_tail.eval_imag_axis(4.0).unwrap(), 1.25, max_relative = 1e-14);
    }

    #[test]
    fn ingest_valid_and_invalid() {
        let m = ingest_tabulated("# comment\n1.0e15, 4.0\n2.0e15 3.0 # trailing\n").unwrap();
        match &m {
            PermittivityModel::Tabulated(t) => assert_eq!(t.samples().count(), 2),
            _ => panic!("expected tabulated"),
        }
        let err = ingest_tabulated("2.0 3.0\n1.0 4.0\n").unwrap_err();
        assert_eq!(
            err,
            DielectricError::Ingestion { line: 2, reason: IngestionReason::NonMonotoneAbscissa }
        );
        let err = ingest_tabulated("1.0 3.0\n2.0 -4.0\n").unwrap_err();
        assert_eq!(
            err,
            DielectricError::Ingestion { line: 2, reason: IngestionReason::NonPositivePermittivity }
        );
        let err = ingest_tabulated("1.0 abc\n").unwrap_err();
        assert_eq!(err, DielectricError::Ingestion { line: 1, reason: IngestionReason::Parse });
    }

    #[test]
    fn undamped_models_real_on_real_axis() {
        let models = [
            PermittivityModel::Constant(-2.5),
            PermittivityModel::plasma(1e16).unwrap(),
            PermittivityModel::drude(1e16, 0.0).unwrap(),
            PermittivityModel::oscillator(
                1.5,
                alloc::vec![OscillatorTerm { strength: 0.5, omega: 2e15, gamma: 0.0 }],
            )
            .unwrap(),
        ];
        for m in &models {
            for i in 1..30 {
                let w = 1e14 * i as f64 * 7.3;
                if let Ok(e) = m.eval_real_axis(w) {
                    assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-15);
                }
            }
        }
    }
}
