//! Table-producing subcommands. Each returns an [`OutputTable`] stamped with
//! the tool version, the configuration hash, and the physical constants the
//! numbers depend on.

use anyhow::anyhow;
use casimir_modes::consts::{C, HBAR};
use casimir_modes::lifshitz::{energy_per_area, force_per_area, GapSpec, QuadratureSpec};
use casimir_modes::scattering::{s_matrix, LayerConfig, Polarization};
use casimir_modes::spectrum::{
    find_modes, mode_census, single_interface_plasmon, single_interface_plasmon_closed_form,
    spectrum_bounds, Symmetry,
};

use crate::config::{Geometry, PresetChoice, RunConfig};
use crate::table::OutputTable;
use crate::{CliError, CliResult};

/// Numeric codes used where a table cell encodes a label; the legend is
/// repeated in the output metadata.
const LEGEND_POL: &str = "0 = TE, 1 = TM";
const LEGEND_SYMMETRY: &str = "0 = antisymmetric, 1 = symmetric";
const LEGEND_KIND: &str = "0 = surface, 1 = waveguide, 2 = hybrid";

fn pol_code(p: Polarization) -> f64 {
    match p {
        Polarization::Te => 0.0,
        Polarization::Tm => 1.0,
    }
}

fn symmetry_code(s: Symmetry) -> f64 {
    match s {
        Symmetry::Antisymmetric => 0.0,
        Symmetry::Symmetric => 1.0,
    }
}

fn stamp(table: &mut OutputTable, cfg: &RunConfig) {
    table.meta("tool", concat!("casimir-modes ", env!("CARGO_PKG_VERSION")));
    table.meta("config-hash", format!("{:016x}", cfg.hash()));
    table.meta("preset", cfg.preset.label());
    table.meta("c [m/s]", format!("{C:.17e}"));
    table.meta("hbar [J s]", format!("{HBAR:.17e}"));
    table.meta("omega_p [rad/s]", format!("{:.17e}", cfg.omega_p));
    match cfg.geometry {
        Geometry::DimensionlessWidth(l) => table.meta("L [2 a omega_p / c]", format!("{l:.17e}")),
        Geometry::Separation(d) => table.meta("d [m]", format!("{d:.17e}")),
    }
}

fn layer(cfg: &RunConfig) -> CliResult<LayerConfig> {
    cfg.layer_config().map_err(CliError::Usage)
}

/// Discrete-branch dispersion data over the `q` grid, with the continuum
/// boundaries so the propagation regions are reconstructible.
pub fn cmd_dispersion(cfg: &RunConfig) -> CliResult<OutputTable> {
    if cfg.preset == PresetChoice::SingleInterface {
        return single_interface_dispersion(cfg);
    }
    let layer = layer(cfg)?;
    let mut table = OutputTable::new(&[
        "q [k/k_ref]",
        "Omega [omega/omega_ref]",
        "polarization",
        "branch",
        "symmetry",
        "kind",
        "Omega_minus [omega_-(q)/omega_ref]",
        "Omega_plus [omega_+(q)/omega_ref]",
    ]);
    stamp(&mut table, cfg);
    table.meta("polarization legend", LEGEND_POL);
    table.meta("symmetry legend", LEGEND_SYMMETRY);
    table.meta("kind legend", LEGEND_KIND);
    table.meta("scaling", "dimensionless per omega_ref = omega_p (or c k_ref), q = k/k_ref");
    let omega_ref = layer.omega_ref();
    for &q in &cfg.q_grid {
        let k = q * layer.k_ref();
        let bounds = spectrum_bounds(&layer, k).map_err(|e| CliError::Numerical(e.into()))?;
        for pol in [Polarization::Te, Polarization::Tm] {
            let modes = find_modes(&layer, pol, k).map_err(|e| CliError::Numerical(e.into()))?;
            for (branch, m) in modes.iter().enumerate() {
                table
                    .push_row(vec![
                        q,
                        m.big_omega,
                        pol_code(pol),
                        branch as f64,
                        symmetry_code(m.symmetry),
                        match m.kind {
                            casimir_modes::spectrum::ModeKind::Surface => 0.0,
                            casimir_modes::spectrum::ModeKind::Waveguide => 1.0,
                            casimir_modes::spectrum::ModeKind::Hybrid => 2.0,
                        },
                        bounds.omega_minus / omega_ref,
                        bounds.omega_plus / omega_ref,
                    ])
                    .map_err(CliError::Numerical)?;
            }
        }
    }
    Ok(table)
}

/// The single-interface plasmon branch with its closed form alongside.
fn single_interface_dispersion(cfg: &RunConfig) -> CliResult<OutputTable> {
    let mut table = OutputTable::new(&[
        "q [k c/omega_p]",
        "Omega [omega/omega_p]",
        "Omega_closed_form [omega/omega_p]",
    ]);
    stamp(&mut table, cfg);
    table.meta("scaling", "dimensionless: Omega = omega/omega_p, q = k c/omega_p");
    for &q in &cfg.q_grid {
        let root = single_interface_plasmon(q).map_err(|e| CliError::Numerical(e.into()))?;
        table
            .push_row(vec![q, root, single_interface_plasmon_closed_form(q)])
            .map_err(CliError::Numerical)?;
    }
    Ok(table)
}

/// Mode census per `(q, polarization)`.
pub fn cmd_modes(cfg: &RunConfig) -> CliResult<OutputTable> {
    let layer = layer(cfg)?;
    let mut table = OutputTable::new(&[
        "q [k/k_ref]",
        "polarization",
        "surface",
        "hybrid",
        "waveguide",
        "fundamental",
    ]);
    stamp(&mut table, cfg);
    table.meta("polarization legend", LEGEND_POL);
    for &q in &cfg.q_grid {
        let k = q * layer.k_ref();
        for pol in [Polarization::Te, Polarization::Tm] {
            let c = mode_census(&layer, pol, k).map_err(|e| CliError::Numerical(e.into()))?;
            table
                .push_row(vec![
                    q,
                    pol_code(pol),
                    c.surface as f64,
                    c.hybrid as f64,
                    c.waveguide as f64,
                    c.fundamental as f64,
                ])
                .map_err(CliError::Numerical)?;
        }
    }
    Ok(table)
}

/// Scattering-matrix scan over the continuum above each `q`'s edge.
pub fn cmd_scatter(cfg: &RunConfig) -> CliResult<OutputTable> {
    let layer = layer(cfg)?;
    let mut table = OutputTable::new(&[
        "q [k/k_ref]",
        "omega [rad/s]",
        "polarization",
        "|t|",
        "|r|",
        "delta [rad]",
        "theta [rad]",
        "unitarity_defect",
    ]);
    stamp(&mut table, cfg);
    table.meta("polarization legend", LEGEND_POL);
    let samples = 256usize;
    for &q in &cfg.q_grid {
        let k = q * layer.k_ref();
        let bounds = spectrum_bounds(&layer, k).map_err(|e| CliError::Numerical(e.into()))?;
        // Both layers must propagate for the 1-D S-matrix to exist.
        let start = bounds.omega_plus * (1.0 + 1e-9);
        let stop = bounds.omega_plus.max(layer.omega_ref()) * 5.0;
        for i in 0..samples {
            let omega = start + (stop - start) * i as f64 / (samples - 1) as f64;
            for pol in [Polarization::Te, Polarization::Tm] {
                let s = s_matrix(pol, &layer, omega, k)
                    .map_err(|e| CliError::Numerical(e.into()))?;
                table
                    .push_row(vec![
                        q,
                        omega,
                        pol_code(pol),
                        s.t.norm(),
                        s.r.norm(),
                        s.delta,
                        s.theta,
                        s.unitarity_defect,
                    ])
                    .map_err(CliError::Numerical)?;
            }
        }
    }
    Ok(table)
}

fn gap_at(cfg: &RunConfig, d: f64) -> CliResult<GapSpec> {
    if cfg.preset == PresetChoice::Ideal {
        return Ok(GapSpec::Ideal { half_gap: 0.5 * d });
    }
    let mut at = cfg.clone();
    at.geometry = Geometry::Separation(d);
    Ok(GapSpec::Material(layer(&at)?))
}

/// Force and energy scan over the separations grid. With `gamma > 0` a
/// lossless-plasma comparison column and the relative difference are added.
pub fn cmd_force(cfg: &RunConfig) -> CliResult<OutputTable> {
    let compare_plasma = cfg.gamma > 0.0;
    let mut columns = vec![
        "d [m]",
        "F [Pa]",
        "F_error [Pa]",
        "F_TE [Pa]",
        "F_TM [Pa]",
        "E [J/m^2]",
        "E_error [J/m^2]",
    ];
    if compare_plasma {
        columns.push("F_plasma [Pa]");
        columns.push("rel_diff_drude_vs_plasma");
    }
    let mut table = OutputTable::new(&columns);
    stamp(&mut table, cfg);
    if compare_plasma {
        table.meta("gamma [rad/s]", format!("{:.17e}", cfg.gamma));
    }
    let quad = QuadratureSpec::default();
    for &d in &cfg.separations {
        let gap = gap_at(cfg, d)?;
        let force = force_per_area(&gap, &quad).map_err(|e| CliError::Numerical(e.into()))?;
        let energy = energy_per_area(&gap, &quad).map_err(|e| CliError::Numerical(e.into()))?;
        let mut row = vec![
            d,
            force.value,
            force.error,
            force.te,
            force.tm,
            energy.value,
            energy.error,
        ];
        if compare_plasma {
            let mut lossless = cfg.clone();
            lossless.gamma = 0.0;
            let gap_p = gap_at(&lossless, d)?;
            let fp = force_per_area(&gap_p, &quad).map_err(|e| CliError::Numerical(e.into()))?;
            row.push(fp.value);
            row.push((force.value - fp.value).abs() / fp.value.abs());
        }
        table.push_row(row).map_err(CliError::Numerical)?;
    }
    Ok(table)
}

/// Energy-only scan over the separations grid.
pub fn cmd_energy(cfg: &RunConfig) -> CliResult<OutputTable> {
    let mut table = OutputTable::new(&[
        "d [m]",
        "E [J/m^2]",
        "E_error [J/m^2]",
        "E_TE [J/m^2]",
        "E_TM [J/m^2]",
    ]);
    stamp(&mut table, cfg);
    let quad = QuadratureSpec::default();
    for &d in &cfg.separations {
        let gap = gap_at(cfg, d)?;
        let energy = energy_per_area(&gap, &quad).map_err(|e| CliError::Numerical(e.into()))?;
        table
            .push_row(vec![d, energy.value, energy.error, energy.te, energy.tm])
            .map_err(CliError::Numerical)?;
    }
    Ok(table)
}

/// Shared guard: commands other than force/energy reject the ideal surrogate.
pub fn reject_ideal(cfg: &RunConfig) -> CliResult<()> {
    if cfg.preset == PresetChoice::Ideal {
        return Err(CliError::Usage(anyhow!(
            "the ideal-mirror surrogate is only meaningful for force/energy"
        )));
    }
    Ok(())
}
