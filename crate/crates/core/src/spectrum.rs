//! Discrete mode finding, classification, and dispersion-curve continuation
//! for the symmetric three-layer stack.
//!
//! Discrete modes live below the propagation threshold of the outer medium,
//! where the field decays on both sides. Their frequencies are the real roots
//! of the symmetric/antisymmetric frequency equations. Internally both
//! equations are evaluated in entire forms — products with `cos(a k2)` or
//! `a sinc(a k2)` that are analytic functions of `k2^2` — so a single real
//! function covers the oscillatory (waveguide) and hyperbolic (surface)
//! regimes and the scan is continuous across the inner light line `k2 = 0`.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float as _;

use crate::consts::C;
use crate::dielectric::{Medium, PermittivityModel};
use crate::scattering::{
    dispersion_function, FrequencyPoint, LayerConfig, Polarization, ScatteringError,
};

/// Dimensionless residual below which a root is accepted.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl Symmetry {
    pub fn label(self) -> &'static str {
        match self {
            Self::Symmetric => "symmetric",
            Self::Antisymmetric => "antisymmetric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Surface,
    Waveguide,
    /// A branch that has crossed the inner light line during continuation.
    Hybrid,
}

impl ModeKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Surface => "surface",
            Self::Waveguide => "waveguide",
            Self::Hybrid => "hybrid",
        }
    }
}

/// Propagation thresholds at fixed transverse wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBounds {
    pub omega_minus: f64,
    pub omega_plus: f64,
    /// Edge of the continuous spectrum: the outer-medium propagation
    /// threshold, above which the field no longer decays at infinity.
    pub continuum_start: f64,
}

/// One discrete eigenfrequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub polarization: Polarization,
    pub symmetry: Symmetry,
    pub kind: ModeKind,
    /// Transverse wavenumber (rad/m).
    pub k: f64,
    /// Eigenfrequency (rad/s).
    pub omega: f64,
    /// `|D(omega)|` at the root.
    pub residual: f64,
    /// `q = k / k_ref`.
    pub q: f64,
    /// `Omega = omega / omega_ref`.
    pub big_omega: f64,
}

/// A traced branch `Omega(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    pub polarization: Polarization,
    pub symmetry: Symmetry,
    /// Ordered `(q, Omega)` samples, strictly increasing in `q`.
    pub samples: Vec<(f64, f64)>,
    /// `q` at which the branch crossed the inner light line, if it did.
    pub crossed_light_line_at: Option<f64>,
    /// True if the root left the real interval before the grid was exhausted.
    pub terminated: bool,
}

/// Sampled transverse profile of a discrete mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    /// Amplitude of the decaying exponential outside (at the interfaces).
    pub outer_amplitude: f64,
    /// Amplitude of the standing solution inside.
    pub inner_amplitude: f64,
    pub z: Vec<f64>,
    pub values: Vec<f64>,
    /// Outside decay rate `kappa_1` (1/m).
    pub decay_rate: f64,
    /// Worst scaled matching residual at the two interfaces.
    pub matching_residual: f64,
}

/// Existence predicates for a dispersionless slab in vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlabExistence {
    /// Waveguide modes: `eps2 > 0, mu2 > 0, eps2 mu2 > 1`.
    pub waveguide: bool,
    /// Symmetric surface modes (both polarizations):
    /// `eps2 < 0, mu2 < 0, eps2 mu2 > 1`.
    pub symmetric_surface: bool,
    /// Antisymmetric surface modes need, in addition, the frequency window
    /// `0 < (a w / c)(eps2 mu2 - 1) < 1/|eps2|` (TM) or `1/|mu2|` (TE); the
    /// window is only checked when a frequency is supplied.
    pub antisymmetric_surface_tm: bool,
    pub antisymmetric_surface_te: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumError {
    Scattering(ScatteringError),
    /// Real-axis mode structure undefined for this medium combination.
    UnsupportedConfig(&'static str),
    /// The root scan found more roots than the counting bound allows.
    ScanFailure { found: usize, bound: usize },
    /// Profile matching system is singular (inner light line).
    DegenerateProfile,
    /// Continuation seed does not satisfy its frequency equation.
    BadSeed,
}

impl fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scattering(e) => write!(f, "scattering: {e}"),
            Self::UnsupportedConfig(what) => write!(f, "unsupported configuration: {what}"),
            Self::ScanFailure { found, bound } => {
                write!(f, "root scan found {found} roots, counting bound is {bound}")
            }
            Self::DegenerateProfile => write!(f, "degenerate profile at the inner light line"),
            Self::BadSeed => write!(f, "continuation seed fails its frequency equation"),
        }
    }
}

impl core::error::Error for SpectrumError {}

impl From<ScatteringError> for SpectrumError {
    fn from(e: ScatteringError) -> Self {
        Self::Scattering(e)
    }
}

/// Frequency at which a medium starts to propagate at transverse wavenumber
/// `k` (the zero of `eps mu w^2/c^2 - k^2`); `inf` if it never propagates.
fn propagation_crossing(medium: &Medium, k: f64) -> Result<f64, SpectrumError> {
    let mu = medium.permeability;
    match &medium.permittivity {
        PermittivityModel::Constant(eps) => {
            let em = eps * mu;
            if em > 0.0 {
                Ok(C * k / em.sqrt())
            } else {
                Ok(f64::INFINITY)
            }
        }
        PermittivityModel::Plasma { omega_p } => {
            if mu <= 0.0 {
                return Err(SpectrumError::UnsupportedConfig(
                    "plasma medium with non-positive permeability",
                ));
            }
            Ok((omega_p * omega_p + C * C * k * k / mu).sqrt())
        }
        _ => Err(SpectrumError::UnsupportedConfig(
            "real-axis mode structure requires constant or plasma media",
        )),
    }
}

/// Propagation thresholds and the continuum edge at fixed `k`.
pub fn spectrum_bounds(config: &LayerConfig, k: f64) -> Result<SpectrumBounds, SpectrumError> {
    let outer = propagation_crossing(&config.outer, k)?;
    let inner = propagation_crossing(&config.inner, k)?;
    Ok(SpectrumBounds {
        omega_minus: outer.min(inner),
        omega_plus: outer.max(inner),
        continuum_start: outer,
    })
}

/// Closed form of the single-interface plasmon branch,
/// `Omega^2 = 1/2 + q^2 - sqrt(1/4 + q^4)`, written without cancellation.
pub fn single_interface_plasmon_closed_form(q: f64) -> f64 {
    let s = (0.25 + q * q * q * q).sqrt();
    (q * q / (0.5 + q * q + s)).sqrt()
}

/// Single-interface plasmon frequency by bisection of the dispersion relation
/// `eps(W) sqrt(q^2 - W^2) + sqrt(q^2 + 1 - W^2) = 0`, `eps(W) = 1 - 1/W^2`.
pub fn single_interface_plasmon(q: f64) -> Result<f64, SpectrumError> {
    if !(q > 0.0) {
        return Err(SpectrumError::UnsupportedConfig("q must be positive"));
    }
    let f = |w: f64| {
        let eps = 1.0 - 1.0 / (w * w);
        eps * (q * q - w * w).sqrt() + (q * q + 1.0 - w * w).sqrt()
    };
    let top = q.min(core::f64::consts::FRAC_1_SQRT_2);
    let mut lo = top * 1e-12;
    let mut hi = top * (1.0 - 1e-15);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `cos(sqrt(x))` continued to negative `x` (`cosh(sqrt(-x))`).
fn cosz(x: f64) -> f64 {
    if x >= 0.0 {
        x.sqrt().cos()
    } else {
        (-x).sqrt().cosh()
    }
}

/// `sinc(sqrt(x)) = sin(sqrt(x))/sqrt(x)` continued to negative `x`.
fn sincz(x: f64) -> f64 {
    let t = x.abs().sqrt();
    if t < 1e-8 {
        // sin(t)/t = 1 - x/6 + x^2/120 - ... in the variable x = t^2 (signed).
        return 1.0 - x / 6.0 + x * x / 120.0;
    }
    if x >= 0.0 {
        t.sin() / t
    } else {
        t.sinh() / t
    }
}

/// Ingredients of the frequency equations at one real `omega` below the
/// continuum edge.
struct Equation<'a> {
    config: &'a LayerConfig,
    pol: Polarization,
    k: f64,
}

impl Equation<'_> {
    /// Polarization weight (`eps` for TM, `mu` for TE) of a constant/plasma
    /// medium at real `omega`; real by construction.
    fn weight(&self, medium: &Medium, omega: f64) -> f64 {
        match self.pol {
            Polarization::Te => medium.permeability,
            Polarization::Tm => match &medium.permittivity {
                PermittivityModel::Constant(e) => *e,
                PermittivityModel::Plasma { omega_p } => 1.0 - (omega_p / omega) * (omega_p / omega),
                _ => f64::NAN,
            },
        }
    }

    fn eps_mu(medium: &Medium, omega: f64) -> f64 {
        let eps = match &medium.permittivity {
            PermittivityModel::Constant(e) => *e,
            PermittivityModel::Plasma { omega_p } => 1.0 - (omega_p / omega) * (omega_p / omega),
            _ => f64::NAN,
        };
        eps * medium.permeability
    }

    /// Scaled frequency-equation value; continuous in `omega`, zero exactly at
    /// the eigenfrequencies, bounded on the whole scan interval.
    ///
    /// Antisymmetric: `g_a = -kappa1 w2 cos(a k2) + w1 a k2^2 sinc(a k2)`,
    /// symmetric: `g_s = -kappa1 w2 a sinc(a k2) - w1 cos(a k2)`, with the
    /// surface regime reached through `k2^2 < 0` and the whole expression
    /// divided by `cosh(a kappa2)` there to stay O(1).
    fn eval(&self, symmetry: Symmetry, omega: f64) -> f64 {
        let a = self.config.half_gap;
        let w1 = self.weight(&self.config.outer, omega);
        let w2 = self.weight(&self.config.inner, omega);
        let k1sq = Self::eps_mu(&self.config.outer, omega) * (omega / C) * (omega / C)
            - self.k * self.k;
        let kappa1 = (-k1sq).max(0.0).sqrt();
        let x = Self::eps_mu(&self.config.inner, omega) * (omega / C) * (omega / C)
            - self.k * self.k;
        let ax = a * a * x; // (a k2)^2, signed
        let (c, s) = (cosz(ax), sincz(ax));
        let kref = self.config.k_ref();
        let g = match symmetry {
            Symmetry::Antisymmetric => (-kappa1 * w2 * c + w1 * a * x * s) / kref,
            Symmetry::Symmetric => -kappa1 * w2 * a * s - w1 * c,
        };
        if ax < 0.0 {
            g / (a * (-x).sqrt()).cosh()
        } else {
            g
        }
    }
}

/// Counting bound for discrete roots of one symmetry class: the waveguide
/// spacing plus surface branches plus slack.
fn root_bound(config: &LayerConfig) -> usize {
    let l = config.dimensionless_width();
    (l / core::f64::consts::PI) as usize + 6
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let falling = flo > 0.0;
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if (fm > 0.0) == falling {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All discrete modes of one polarization at fixed `k`, sorted by frequency.
pub fn find_modes(
    config: &LayerConfig,
    pol: Polarization,
    k: f64,
) -> Result<Vec<Mode>, SpectrumError> {
    let bounds = spectrum_bounds(config, k)?;
    let top = bounds.continuum_start;
    if !(top > 0.0) || !top.is_finite() {
        return Ok(Vec::new());
    }
    let eq = Equation { config, pol, k };
    let omega_ref = config.omega_ref();
    let l = config.dimensionless_width();
    let step = (0.25 * core::f64::consts::PI / l).min(0.01) * omega_ref;

    // Scan grid: uniform steps plus geometric refinement towards 0, the inner
    // light line (both sides) and the continuum edge, where roots cluster.
    let mut grid: Vec<f64> = Vec::new();
    let mut w = step.min(top * 1e-3);
    while w < top {
        grid.push(w);
        w += step;
    }
    fn refine(grid: &mut Vec<f64>, step: f64, top: f64, center: f64, dir: f64) {
        let mut d = step;
        for _ in 0..48 {
            d *= 0.5;
            let p = center + dir * d;
            if p > 0.0 && p < top {
                grid.push(p);
            }
        }
    }
    refine(&mut grid, step, top, 0.0, 1.0);
    refine(&mut grid, step, top, top, -1.0);
    if bounds.omega_minus > 0.0 && bounds.omega_minus < top {
        grid.push(bounds.omega_minus);
        refine(&mut grid, step, top, bounds.omega_minus, -1.0);
        refine(&mut grid, step, top, bounds.omega_minus, 1.0);
    }
    grid.sort_by(|p, q| p.partial_cmp(q).unwrap());
    grid.dedup();

    let mut modes: Vec<Mode> = Vec::new();
    for symmetry in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
        let f = |w: f64| eq.eval(symmetry, w);
        let mut prev: Option<(f64, f64)> = None;
        for &wg in &grid {
            let fw = f(wg);
            if !fw.is_finite() {
                prev = None;
                continue;
            }
            if let Some((w0, f0)) = prev {
                if f0 == 0.0 {
                    // Exact grid hit; extremely unlikely, handled as a root.
                    modes.push(make_mode(config, pol, symmetry, k, w0, &bounds)?);
                } else if f0 * fw < 0.0 {
                    let root = bisect(&f, w0, wg, f0);
                    modes.push(make_mode(config, pol, symmetry, k, root, &bounds)?);
                }
            }
            prev = Some((wg, fw));
        }
    }
    // Merge near-duplicates from refinement overlap.
    modes.sort_by(|m, n| m.omega.partial_cmp(&n.omega).unwrap());
    modes.dedup_by(|m, n| {
        m.symmetry == n.symmetry && (m.omega - n.omega).abs() <= 1e-9 * n.omega.max(m.omega)
    });
    let bound = root_bound(config);
    if modes.len() > bound {
        return Err(SpectrumError::ScanFailure { found: modes.len(), bound });
    }
    Ok(modes)
}

fn make_mode(
    config: &LayerConfig,
    pol: Polarization,
    symmetry: Symmetry,
    k: f64,
    omega: f64,
    bounds: &SpectrumBounds,
) -> Result<Mode, SpectrumError> {
    let kind =
        if omega < bounds.omega_minus { ModeKind::Surface } else { ModeKind::Waveguide };
    let residual = match dispersion_function(pol, config, FrequencyPoint::RealAxis(omega), k) {
        Ok(d) => d.norm(),
        // A root of D is a pole of the amplitudes; if the Fresnel denominator
        // itself degenerates, record its residual instead.
        Err(ScatteringError::Pole { residual }) => residual,
        Err(e) => return Err(e.into()),
    };
    Ok(Mode {
        polarization: pol,
        symmetry,
        kind,
        k,
        omega,
        residual,
        q: k / config.k_ref(),
        big_omega: omega / config.omega_ref(),
    })
}

/// Trace one branch across `q_grid` (dimensionless, strictly increasing) by
/// continuation from `seed`.
pub fn trace_dispersion(
    config: &LayerConfig,
    pol: Polarization,
    seed: &Mode,
    q_grid: &[f64],
) -> Result<DispersionCurve, SpectrumError> {
    let omega_ref = config.omega_ref();
    let kref = config.k_ref();
    let mut curve = DispersionCurve {
        polarization: pol,
        symmetry: seed.symmetry,
        samples: Vec::new(),
        crossed_light_line_at: None,
        terminated: false,
    };
    // Certify the seed.
    let eq0 = Equation { config, pol, k: seed.k };
    if eq0.eval(seed.symmetry, seed.omega).abs() > 1e-6 {
        return Err(SpectrumError::BadSeed);
    }
    let mut prev_q = seed.q;
    let mut prev_om = seed.big_omega;
    curve.samples.push((prev_q, prev_om));
    // The inner light line in dimensionless variables, Omega = q * c_inner/c.
    let inner_slope = {
        let em = Equation::eps_mu(&config.inner, omega_ref); // constant media only
        if em > 0.0 && !em.is_nan() { 1.0 / em.sqrt() } else { f64::NAN }
    };
    for &q in q_grid.iter().filter(|&&q| q > seed.q) {
        match continue_root(config, pol, seed.symmetry, prev_q, prev_om, q) {
            Some(om) => {
                if let Some(sl) = Some(inner_slope).filter(|s| s.is_finite()) {
                    let before = prev_om - sl * prev_q;
                    let after = om - sl * q;
                    if before * after < 0.0 && curve.crossed_light_line_at.is_none() {
                        curve.crossed_light_line_at =
                            Some(refine_light_line(config, pol, seed.symmetry, prev_q, q, sl));
                    }
                }
                curve.samples.push((q, om));
                prev_q = q;
                prev_om = om;
            }
            None => {
                curve.terminated = true;
                break;
            }
        }
    }
    let _ = kref;
    Ok(curve)
}

/// One continuation step: from a certified root at `(q0, om0)` to the root at
/// `q1` (either direction), recursively halving the step when bracketing
/// fails.
fn continue_root(
    config: &LayerConfig,
    pol: Polarization,
    symmetry: Symmetry,
    q0: f64,
    om0: f64,
    q1: f64,
) -> Option<f64> {
    fn step(
        config: &LayerConfig,
        pol: Polarization,
        symmetry: Symmetry,
        q0: f64,
        om0: f64,
        q1: f64,
        depth: u32,
    ) -> Option<f64> {
        let omega_ref = config.omega_ref();
        let k = q1 * config.k_ref();
        let eq = Equation { config, pol, k };
        let top = spectrum_bounds(config, k).ok()?.continuum_start / omega_ref;
        let f = |om: f64| eq.eval(symmetry, om * omega_ref);
        // Expand a bracket around the previous root. Branch slopes |dOmega/dq|
        // are O(1), so over a small step the continued root stays within
        // ~2|dq| of the previous one; a root outside that window belongs to a
        // neighboring branch of the same symmetry and is rejected.
        let dq = (q1 - q0).abs().max(1e-9);
        let mut h = 2.0 * dq;
        for _ in 0..52 {
            let lo = (om0 - h).max(top * 1e-12);
            let hi = (om0 + h).min(top * (1.0 - 1e-15));
            if lo < hi {
                let (flo, fhi) = (f(lo), f(hi));
                if flo.is_finite() && fhi.is_finite() && flo * fhi < 0.0 {
                    let root = bisect(&f, lo, hi, flo);
                    if (root - om0).abs() <= 2.0 * dq + 1e-9 {
                        return Some(root);
                    }
                }
            }
            h *= 0.5;
        }
        if depth == 0 {
            return None;
        }
        let qm = 0.5 * (q0 + q1);
        let om_mid = step(config, pol, symmetry, q0, om0, qm, depth - 1)?;
        step(config, pol, symmetry, qm, om_mid, q1, depth - 1)
    }
    // March in sub-steps small enough that the acceptance window around the
    // previous root cannot reach a neighboring branch.
    let span = q1 - q0;
    let n = (span.abs() / 0.05).ceil().max(1.0) as usize;
    let mut q = q0;
    let mut om = om0;
    for i in 1..=n {
        let q_next = q0 + span * i as f64 / n as f64;
        om = step(config, pol, symmetry, q, om, q_next, 12)?;
        q = q_next;
    }
    Some(om)
}

/// Branch-resolved head count of the discrete spectrum at fixed `k`.
///
/// `find_modes` is complete: besides the width-quantized waveguide ladder it
/// returns, per polarization, a fundamental guided branch with no width
/// cutoff (it persists for arbitrarily narrow gaps, sliding up towards the
/// continuum edge), and it reports the hybrid branch as a waveguide-region
/// root while it sits above the inner light line. Mode-count estimates of the
/// standing-wave type enumerate only the ladder, so the census classifies
/// each waveguide-region root by tracing its branch: towards zero width (a
/// root that survives is `fundamental`) and towards large `q` (a branch that
/// crosses the inner light line is `hybrid`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeCensus {
    pub surface: usize,
    pub hybrid: usize,
    /// Width-quantized waveguide modes: waveguide-region roots that are
    /// neither fundamental nor hybrid.
    pub waveguide: usize,
    /// No-cutoff guided branches outside the width-quantized ladder.
    pub fundamental: usize,
}

pub fn mode_census(
    config: &LayerConfig,
    pol: Polarization,
    k: f64,
) -> Result<ModeCensus, SpectrumError> {
    let modes = find_modes(config, pol, k)?;
    let omega_ref = config.omega_ref();
    let inner_slope = {
        let em = Equation::eps_mu(&config.inner, omega_ref);
        if em > 0.0 && !em.is_nan() { 1.0 / em.sqrt() } else { f64::NAN }
    };
    let mut census = ModeCensus { surface: 0, hybrid: 0, waveguide: 0, fundamental: 0 };
    for m in &modes {
        if m.kind == ModeKind::Surface {
            census.surface += 1;
            continue;
        }
        if inner_slope.is_finite() && branch_crosses_light_line(config, pol, m, inner_slope) {
            census.hybrid += 1;
        } else if branch_is_fundamental(config, pol, m) {
            census.fundamental += 1;
        } else {
            census.waveguide += 1;
        }
    }
    Ok(census)
}

/// Shrink the gap width towards zero at fixed `k` and follow the root. Ladder
/// modes hit their width cutoff and merge into the continuum; the fundamental
/// branch survives. The frequency increases monotonically as the gap narrows,
/// so at each width the continued root is the nearest zero above the previous
/// one; the continuum edge does not move because it is set by the outer
/// medium alone.
fn branch_is_fundamental(config: &LayerConfig, pol: Polarization, m: &Mode) -> bool {
    let top = match spectrum_bounds(config, m.k) {
        Ok(b) => b.continuum_start,
        Err(_) => return false,
    };
    let l_min = 0.05 * config.half_gap / config.dimensionless_width().max(1e-300);
    let mut cfg = config.clone();
    let mut om = m.omega;
    while cfg.half_gap > l_min {
        cfg.half_gap *= 0.8;
        let eq = Equation { config: &cfg, pol, k: m.k };
        let f = |w: f64| eq.eval(m.symmetry, w);
        // March upward to the first sign change above the previous root.
        let lo = om * (1.0 - 1e-9);
        let hi = top * (1.0 - 1e-15);
        if !(lo < hi) {
            return false;
        }
        let n = 400;
        let step = (hi - lo) / n as f64;
        let mut x0 = lo;
        let mut f0 = f(x0);
        let mut found = None;
        for i in 1..=n {
            let x1 = lo + step * i as f64;
            let f1 = f(x1);
            if f0.is_finite() && f1.is_finite() && f0 * f1 < 0.0 {
                found = Some(bisect(&f, x0, x1, f0));
                break;
            }
            x0 = x1;
            f0 = f1;
        }
        match found {
            Some(root) => om = root,
            None => return false,
        }
    }
    true
}

/// Trace the branch towards larger `q` and look for a crossing of the inner
/// light line `Omega = slope * q`.
fn branch_crosses_light_line(
    config: &LayerConfig,
    pol: Polarization,
    m: &Mode,
    slope: f64,
) -> bool {
    let mut q = m.q;
    let mut om = m.big_omega;
    let q_max = 3.0_f64.max(2.0 * m.q);
    let mut side = om - slope * q;
    if side < 0.0 {
        // Already below the line at this q: waveguide-region root cannot be.
        return false;
    }
    while q < q_max {
        let q_next = (q + 0.05).min(q_max);
        match continue_root(config, pol, m.symmetry, q, om, q_next) {
            Some(next) => {
                q = q_next;
                om = next;
                let s = om - slope * q;
                if side * s < 0.0 {
                    return true;
                }
                side = s;
            }
            None => return false,
        }
    }
    false
}

/// Refine the light-line crossing `Omega(q) = slope * q` to high accuracy.
fn refine_light_line(
    config: &LayerConfig,
    pol: Polarization,
    symmetry: Symmetry,
    mut lo: f64,
    mut hi: f64,
    slope: f64,
) -> f64 {
    let omega_ref = config.omega_ref();
    // h(q) < 0 below the light line; the frequency equation evaluated exactly
    // on the line Omega = slope*q changes sign in q at the crossing.
    let on_line = |q: f64| {
        let k = q * config.k_ref();
        let eq = Equation { config, pol, k };
        eq.eval(symmetry, slope * q * omega_ref)
    };
    let flo = on_line(lo);
    if !(flo * on_line(hi) < 0.0) {
        return 0.5 * (lo + hi);
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if on_line(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Waveguide-mode frequency estimates for a vacuum slot in plasma bulk:
/// `Omega_n^2 ~ q^2 + n^2 pi^2 / L^2`, `n = 1 ..`, strictly `n < L/pi`.
///
/// `n = 0` sits on the light line and is excluded from the count.
pub fn waveguide_mode_estimate(
    config: &LayerConfig,
    k: f64,
) -> Result<(Vec<f64>, usize), SpectrumError> {
    if !config.has_vacuum_gap() || config.outer.plasma_frequency().is_none() {
        return Err(SpectrumError::UnsupportedConfig(
            "waveguide estimate needs a vacuum slot in plasma bulk",
        ));
    }
    let l = config.dimensionless_width();
    let q = k / config.k_ref();
    let mut omegas = Vec::new();
    let mut n = 1.0_f64;
    while n < l / core::f64::consts::PI {
        let r = n * core::f64::consts::PI / l;
        omegas.push((q * q + r * r).sqrt());
        n += 1.0;
    }
    let count = omegas.len();
    Ok((omegas, count))
}

/// Transverse profile of a discrete mode on `z_grid`, normalized to
/// `max |profile| = 1`.
///
/// The inside solution is `sin(k2 z)` for symmetric modes (the convention
/// takes the potential antisymmetric, its derivative symmetric) and
/// `cos(k2 z)` for antisymmetric ones; outside, a decaying exponential.
pub fn field_profile(
    mode: &Mode,
    config: &LayerConfig,
    z_grid: &[f64],
) -> Result<FieldProfile, SpectrumError> {
    let a = config.half_gap;
    let omega = mode.omega;
    let k = mode.k;
    let k1sq = Equation::eps_mu(&config.outer, omega) * (omega / C) * (omega / C) - k * k;
    if !(k1sq < 0.0) {
        return Err(SpectrumError::UnsupportedConfig("mode does not decay outside"));
    }
    let kappa1 = (-k1sq).sqrt();
    let x = Equation::eps_mu(&config.inner, omega) * (omega / C) * (omega / C) - k * k;
    let ax = a * a * x;
    if ax.abs() < 1e-20 {
        return Err(SpectrumError::DegenerateProfile);
    }
    // Inside solution and its derivative, per symmetry and regime.
    let inner = |z: f64| -> f64 {
        let t = x.abs().sqrt() * z;
        match (mode.symmetry, x >= 0.0) {
            (Symmetry::Symmetric, true) => t.sin(),
            (Symmetry::Symmetric, false) => t.sinh(),
            (Symmetry::Antisymmetric, true) => t.cos(),
            (Symmetry::Antisymmetric, false) => t.cosh(),
        }
    };
    let inner_deriv = |z: f64| -> f64 {
        let s = x.abs().sqrt();
        let t = s * z;
        match (mode.symmetry, x >= 0.0) {
            (Symmetry::Symmetric, true) => s * t.cos(),
            (Symmetry::Symmetric, false) => s * t.cosh(),
            (Symmetry::Antisymmetric, true) => -s * t.sin(),
            (Symmetry::Antisymmetric, false) => s * t.sinh(),
        }
    };
    let eq = Equation { config, pol: mode.polarization, k };
    let w1 = eq.weight(&config.outer, omega);
    let w2 = eq.weight(&config.inner, omega);
    // Continuity of the potential fixes the outside amplitude; the second
    // matching condition (jump-free weighted derivative) is the frequency
    // equation and its violation is reported as the matching residual.
    let phi_a = inner(a);
    let dphi_a = inner_deriv(a);
    if phi_a == 0.0 && dphi_a == 0.0 {
        return Err(SpectrumError::DegenerateProfile);
    }
    let outer_amp = phi_a;
    let scale = (dphi_a / w2).abs().max((kappa1 * phi_a / w1).abs()).max(1e-300);
    let matching_residual = (dphi_a / w2 + kappa1 * phi_a / w1).abs() / scale;
    let mut values: Vec<f64> = z_grid
        .iter()
        .map(|&z| {
            if z < -a {
                let sign = match mode.symmetry {
                    Symmetry::Symmetric => -1.0,
                    Symmetry::Antisymmetric => 1.0,
                };
                sign * outer_amp * (kappa1 * (z + a)).exp()
            } else if z > a {
                outer_amp * (-kappa1 * (z - a)).exp()
            } else {
                inner(z)
            }
        })
        .collect();
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        for v in values.iter_mut() {
            *v /= peak;
        }
    }
    Ok(FieldProfile {
        outer_amplitude: outer_amp / peak.max(1e-300),
        inner_amplitude: 1.0 / peak.max(1e-300),
        z: z_grid.to_vec(),
        values,
        decay_rate: kappa1,
        matching_residual,
    })
}

/// Existence predicates for a dispersionless slab `(eps2, mu2)` in vacuum.
///
/// `omega`, when supplied, activates the antisymmetric-surface frequency
/// window `0 < (a w / c)(eps2 mu2 - 1) < 1/|eps2|` (TM) resp. `1/|mu2|` (TE).
pub fn left_handed_existence(
    eps2: f64,
    mu2: f64,
    half_gap: f64,
    omega: Option<f64>,
) -> SlabExistence {
    let em = eps2 * mu2;
    let waveguide = eps2 > 0.0 && mu2 > 0.0 && em > 1.0;
    let symmetric_surface = eps2 < 0.0 && mu2 < 0.0 && em > 1.0;
    let window = |cap: f64| match omega {
        None => true,
        Some(w) => {
            let v = half_gap * w / C * (em - 1.0);
            v > 0.0 && v < cap
        }
    };
    SlabExistence {
        waveguide,
        symmetric_surface,
        antisymmetric_surface_tm: symmetric_surface && window(1.0 / eps2.abs()),
        antisymmetric_surface_te: symmetric_surface && window(1.0 / mu2.abs()),
    }
}

/// Surface-mode existence for a vacuum gap between constant half-spaces:
/// left-handed outer media with `eps1 mu1 > 1` carry four surface modes.
pub fn gap_surface_existence(eps1: f64, mu1: f64) -> bool {
    eps1 < 0.0 && mu1 < 0.0 && eps1 * mu1 > 1.0
}
