//! The verification suites behind `casimir-modes verify`.
//!
//! Each suite is a list of named checks with a measured value and a
//! threshold; a check passes when `value <= threshold`. The runner prints a
//! human-readable table and produces a machine-readable JSON report.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Result};
use casimir_modes::consts::C;
use casimir_modes::lifshitz::{
    energy_per_area, force_p_form, force_per_area, ideal_mirror_energy, ideal_mirror_force,
    GapSpec, QuadratureSpec,
};
use casimir_modes::scattering::{s_matrix, LayerConfig, Polarization};
use casimir_modes::spectral_sum::equivalence_report;
use casimir_modes::spectrum::{
    find_modes, mode_census, single_interface_plasmon, single_interface_plasmon_closed_form,
    spectrum_bounds, trace_dispersion, Symmetry,
};

use crate::config::RunConfig;
use crate::table::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Unitarity,
    Plasmon,
    Modes,
    Lifshitz,
    SpectralSum,
    All,
}

impl std::str::FromStr for Suite {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unitarity" => Ok(Self::Unitarity),
            "plasmon" => Ok(Self::Plasmon),
            "modes" => Ok(Self::Modes),
            "lifshitz" => Ok(Self::Lifshitz),
            "spectral-sum" => Ok(Self::SpectralSum),
            "all" => Ok(Self::All),
            other => bail!(
                "unknown suite {other:?} (expected unitarity, plasmon, modes, lifshitz, \
                 spectral-sum or all)"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.value <= self.threshold
    }
}

/// Run the requested suite(s). Numerical failures inside a check become a
/// failed check rather than an abort, so one broken suite cannot hide the
/// others' results.
pub fn run(suite: Suite, cfg: &RunConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    let suites: &[Suite] = match suite {
        Suite::All => &[
            Suite::Unitarity,
            Suite::Plasmon,
            Suite::Modes,
            Suite::Lifshitz,
            Suite::SpectralSum,
        ],
        s => std::slice::from_ref(match s {
            Suite::Unitarity => &Suite::Unitarity,
            Suite::Plasmon => &Suite::Plasmon,
            Suite::Modes => &Suite::Modes,
            Suite::Lifshitz => &Suite::Lifshitz,
            Suite::SpectralSum => &Suite::SpectralSum,
            Suite::All => unreachable!(),
        }),
    };
    for s in suites {
        match s {
            Suite::Unitarity => unitarity(cfg, &mut checks),
            Suite::Plasmon => plasmon(&mut checks),
            Suite::Modes => modes(cfg, &mut checks),
            Suite::Lifshitz => lifshitz(cfg, &mut checks),
            Suite::SpectralSum => spectral_sum(cfg, &mut checks),
            Suite::All => {}
        }
    }
    checks
}

/// A measured value, or the failure sentinel (infinite, so the check fails).
fn measure(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

fn unitarity(cfg: &RunConfig, out: &mut Vec<Check>) {
    let value = measure((|| {
        let a = 0.5 * 0.63 * C / cfg.omega_p;
        let layer = LayerConfig::preset_iii(cfg.omega_p, a)?;
        let k = layer.k_ref();
        let bounds = spectrum_bounds(&layer, k)?;
        let start = bounds.omega_plus * (1.0 + 1e-9);
        let stop = 5.0 * layer.omega_ref().max(bounds.omega_plus);
        let mut worst = 0.0_f64;
        for i in 0..1000 {
            let omega = start + (stop - start) * i as f64 / 999.0;
            for pol in [Polarization::Te, Polarization::Tm] {
                worst = worst.max(s_matrix(pol, &layer, omega, k)?.unitarity_defect);
            }
        }
        Ok(worst)
    })());
    out.push(Check {
        suite: "unitarity",
        name: "max S-matrix unitarity defect, 1000-point continuum grid",
        value,
        threshold: 1e-12,
    });
}

fn plasmon(out: &mut Vec<Check>) {
    let closed_form = measure((|| {
        let mut worst = 0.0_f64;
        for q in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let root = single_interface_plasmon(q)?;
            worst = worst.max((root - single_interface_plasmon_closed_form(q)).abs());
        }
        Ok(worst)
    })());
    out.push(Check {
        suite: "plasmon",
        name: "single-interface root vs closed form, absolute",
        value: closed_form,
        threshold: 1e-10,
    });
    let small_q = measure((|| {
        let q = 0.01;
        let root = single_interface_plasmon(q)?;
        Ok((root - q * (1.0 - q * q / 2.0)).abs() / q)
    })());
    out.push(Check {
        suite: "plasmon",
        name: "small-q asymptotics at q = 0.01, relative",
        value: small_q,
        threshold: 1e-6,
    });
    let large_q = measure((|| {
        let q = 50.0;
        let root = single_interface_plasmon(q)?;
        Ok((root - core::f64::consts::FRAC_1_SQRT_2 * (1.0 - 1.0 / (8.0 * q * q))).abs())
    })());
    out.push(Check {
        suite: "plasmon",
        name: "large-q asymptotics at q = 50, absolute",
        value: large_q,
        threshold: 1e-6,
    });
}

fn modes(cfg: &RunConfig, out: &mut Vec<Check>) {
    let wp = cfg.omega_p;
    let slot = |l: f64| LayerConfig::preset_iv(wp, 0.5 * l * C / wp);
    // Waveguide counts in the vacuum slot at the two reference widths.
    let counts = measure((|| {
        let mut worst = 0usize;
        for (l, expected) in [(0.63, 0usize), (6.3, 2usize)] {
            let layer = slot(l)?;
            for pol in [Polarization::Te, Polarization::Tm] {
                let c = mode_census(&layer, pol, layer.k_ref())?;
                worst = worst.max(c.waveguide.abs_diff(expected));
            }
        }
        Ok(worst as f64)
    })());
    out.push(Check {
        suite: "modes",
        name: "vacuum-slot waveguide counts (0 at L=0.63, 2 at L=6.3), max deviation",
        value: counts,
        threshold: 0.0,
    });
    // Slab ordering: antisymmetric above symmetric everywhere sampled.
    let ordering = measure((|| {
        let layer = LayerConfig::preset_iii(wp, 0.5 * 0.63 * C / wp)?;
        let mut violations = 0usize;
        for i in 1..=20 {
            let k = 0.25 * i as f64 * layer.k_ref();
            let surf: Vec<_> = find_modes(&layer, Polarization::Tm, k)?
                .into_iter()
                .filter(|m| m.kind == casimir_modes::spectrum::ModeKind::Surface)
                .collect();
            let anti = surf.iter().find(|m| m.symmetry == Symmetry::Antisymmetric);
            let sym = surf.iter().find(|m| m.symmetry == Symmetry::Symmetric);
            if let (Some(a), Some(s)) = (anti, sym) {
                if a.omega <= s.omega {
                    violations += 1;
                }
            }
        }
        Ok(violations as f64)
    })());
    out.push(Check {
        suite: "modes",
        name: "slab surface-branch ordering omega_a > omega_s, violations",
        value: ordering,
        threshold: 0.0,
    });
    // Hybrid crossing of the light line.
    let crossing = measure((|| {
        let l = 0.63;
        let layer = slot(l)?;
        let kp = layer.k_ref();
        let seed = find_modes(&layer, Polarization::Tm, 0.2 * kp)?
            .into_iter()
            .find(|m| m.symmetry == Symmetry::Symmetric)
            .ok_or_else(|| anyhow!("no symmetric seed"))?;
        let grid: Vec<f64> = (1..=120).map(|i| 0.2 + 1.3 * i as f64 / 120.0).collect();
        let curve = trace_dispersion(&layer, Polarization::Tm, &seed, &grid)?;
        let q_cr = curve
            .crossed_light_line_at
            .ok_or_else(|| anyhow!("no light-line crossing found"))?;
        Ok((q_cr - 1.0 / (1.0 + l / 2.0).sqrt()).abs())
    })());
    out.push(Check {
        suite: "modes",
        name: "hybrid light-line crossing vs 1/sqrt(1 + L/2), absolute",
        value: crossing,
        threshold: 1e-6,
    });
}

fn lifshitz(cfg: &RunConfig, out: &mut Vec<Check>) {
    let quad = QuadratureSpec::default();
    let ideal = measure((|| {
        let d = 1e-6;
        let gap = GapSpec::Ideal { half_gap: 0.5 * d };
        let f = force_per_area(&gap, &quad)?;
        let e = energy_per_area(&gap, &quad)?;
        let rf = (f.value - ideal_mirror_force(d)).abs() / ideal_mirror_force(d).abs();
        let re = (e.value - ideal_mirror_energy(d)).abs() / ideal_mirror_energy(d).abs();
        Ok(rf.max(re))
    })());
    out.push(Check {
        suite: "lifshitz",
        name: "ideal mirror F and E at d = 1 um vs closed form, relative",
        value: ideal,
        threshold: 1e-6,
    });
    let gold = || -> Result<GapSpec> {
        let mut at = cfg.clone();
        at.preset = crate::config::PresetChoice::IV;
        at.gamma = 0.0;
        at.geometry = crate::config::Geometry::Separation(100e-9);
        Ok(GapSpec::Material(at.layer_config()?))
    };
    let routes = measure((|| {
        let gap = gold()?;
        let a = force_per_area(&gap, &quad)?;
        let b = force_p_form(&gap, &quad)?;
        Ok((a.value - b.value).abs() / a.value.abs())
    })());
    out.push(Check {
        suite: "lifshitz",
        name: "(zeta,k) vs (zeta,p) force routes, gold plasma d = 100 nm, relative",
        value: routes,
        threshold: 1e-8,
    });
    let consistency = measure((|| {
        let gap = gold()?;
        let d = gap.separation();
        let h = 1e-3 * d;
        let at = |sep: f64| -> Result<f64> {
            let mut c = cfg.clone();
            c.preset = crate::config::PresetChoice::IV;
            c.gamma = 0.0;
            c.geometry = crate::config::Geometry::Separation(sep);
            Ok(energy_per_area(&GapSpec::Material(c.layer_config()?), &quad)?.value)
        };
        let f = force_per_area(&gap, &quad)?.value;
        let dedd = (at(d + h)? - at(d - h)?) / (2.0 * h);
        Ok((f + dedd).abs() / f.abs())
    })());
    out.push(Check {
        suite: "lifshitz",
        name: "force vs -dE/dd centered difference, gold plasma d = 100 nm, relative",
        value: consistency,
        threshold: 1e-4,
    });
}

fn spectral_sum(cfg: &RunConfig, out: &mut Vec<Check>) {
    let tol = cfg.tol;
    let wide = measure((|| {
        let layer = LayerConfig::preset_iv(cfg.omega_p, 0.5 * 6.3 * C / cfg.omega_p)?;
        let kp = layer.k_ref();
        let ks: Vec<f64> = [0.2, 0.5, 1.0, 2.0].iter().map(|q| q * kp).collect();
        let report = equivalence_report(&layer, Polarization::Tm, &ks, tol)?;
        Ok(report.iter().map(|r| r.rel_diff).fold(0.0, f64::max))
    })());
    out.push(Check {
        suite: "spectral-sum",
        name: "mode-sum vs Lifshitz route, vacuum slot L = 6.3 TM, max relative",
        value: wide,
        threshold: tol,
    });
    let continuum_only = measure((|| {
        let layer = LayerConfig::preset_ii(1.5, 1.5, 50e-9)?;
        let ks = [0.5 * layer.k_ref(), 2.0 * layer.k_ref()];
        let report = equivalence_report(&layer, Polarization::Tm, &ks, tol)?;
        let max_rel = report.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
        if report.iter().any(|r| r.discrete != 0.0) {
            bail!("right-handed gap unexpectedly has discrete modes");
        }
        Ok(max_rel)
    })());
    out.push(Check {
        suite: "spectral-sum",
        name: "continuum-only route equivalence, right-handed gap, max relative",
        value: continuum_only,
        threshold: tol,
    });
}

/// Human-readable pass/fail table.
pub fn render_table(checks: &[Check]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:<72} {:>12} {:>12} {:>6}", "suite", "check", "value",
        "threshold", "result");
    for c in checks {
        let _ = writeln!(
            out,
            "{:<12} {:<72} {:>12.3e} {:>12.3e} {:>6}",
            c.suite,
            c.name,
            c.value,
            c.threshold,
            if c.pass() { "PASS" } else { "FAIL" }
        );
    }
    let passed = checks.iter().filter(|c| c.pass()).count();
    let _ = writeln!(out, "{passed}/{} checks passed", checks.len());
    out
}

/// Machine-readable JSON report.
pub fn render_json(checks: &[Check], cfg: &RunConfig) -> String {
    let report = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "tool": concat!("casimir-modes ", env!("CARGO_PKG_VERSION")),
        "config_hash": format!("{:016x}", cfg.hash()),
        "checks": checks.iter().map(|c| serde_json::json!({
            "suite": c.suite,
            "name": c.name,
            "value": c.value,
            "threshold": c.threshold,
            "pass": c.pass(),
        })).collect::<Vec<_>>(),
        "all_pass": checks.iter().all(Check::pass),
    });
    let mut s = serde_json::to_string_pretty(&report).expect("report serialization");
    s.push('\n');
    s
}
