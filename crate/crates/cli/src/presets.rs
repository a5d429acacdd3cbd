//! The four coalescence experiments: shock and anti-shock initial data with
//! `α ∈ {1, 4}` on the half-line, regularized modular flux.

use coalesce_core::{FluxSpec, InitialConditionSpec, LeftBoundary};

use crate::manifest::{
    BoundsSection, ExperimentManifest, FitSection, GridSection, RunSection, TimeSection,
};

pub const PRESET_NAMES: [&str; 4] = ["shock-a1", "shock-a4", "anti-a1", "anti-a4"];

pub const H: f64 = 0.01;
pub const TAU: f64 = 0.0005;
pub const EPSILON: f64 = 1e-16;

pub fn preset(name: &str) -> Option<ExperimentManifest> {
    let (ic, half_width, t_end) = match name {
        "shock-a1" => (InitialConditionSpec::shock_alpha(1.0), 5.0, 0.3),
        "shock-a4" => (InitialConditionSpec::shock_alpha(4.0), 10.0, 1.5),
        "anti-a1" => (InitialConditionSpec::antishock_alpha(1.0), 5.0, 0.4),
        "anti-a4" => (InitialConditionSpec::antishock_alpha(4.0), 10.0, 1.6),
        _ => return None,
    };
    Some(ExperimentManifest {
        name: name.to_string(),
        output: None,
        flux: FluxSpec::regularized_modular(EPSILON),
        grid: GridSection {
            x_min: 0.0,
            x_max: half_width,
            h: Some(H),
            n_nodes: None,
        },
        time: TimeSection {
            t_end,
            tau: Some(TAU),
            n_steps: None,
        },
        initial: ic,
        run: RunSection {
            bc_left: Some(LeftBoundary::Dirichlet0),
            ..RunSection::default()
        },
        fit: Some(FitSection::default()),
        bounds: BoundsSection::default(),
        overlays: Vec::new(),
    })
}

pub fn presets() -> Vec<ExperimentManifest> {
    PRESET_NAMES.iter().filter_map(|n| preset(n)).collect()
}
