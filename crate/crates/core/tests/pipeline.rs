use coalesce_core::analysis::{fit_scaling_law, FitOptions, WindowPolicy};
use coalesce_core::interfaces::{match_tracks, select_coalescing_branch, sturm_check};
use coalesce_core::io::{read_track_csv, read_trajectory, write_track_csv, write_trajectory};
use coalesce_core::solver::run;
use coalesce_core::{FluxSpec, InitialConditionSpec, LeftBoundary, SimConfig, SpatialGrid, TimeGrid};

fn shock_a1() -> SimConfig {
    SimConfig {
        flux: FluxSpec::regularized_modular(1e-16),
        grid: SpatialGrid::with_spacing(0.0, 5.0, 0.01).unwrap(),
        time: TimeGrid::with_step(0.3, 0.0005).unwrap(),
        ic: InitialConditionSpec::shock_alpha(1.0),
        bc_left: LeftBoundary::Dirichlet0,
        snapshot_stride: 50,
    }
}

#[test]
fn shock_run_to_scaling_fit() {
    let cfg = shock_a1();
    let out = run(&cfg).unwrap();
    assert!(out.warnings.is_empty(), "{:?}", out.warnings);
    assert!(sturm_check(&out.track).is_ok());

    let branches = match_tracks(&out.track, 20.0 * cfg.grid.h());
    let b = select_coalescing_branch(&branches).unwrap();
    let end = b.end.unwrap();
    assert!((end - 0.254).abs() < 0.002, "{end}");

    let opts = FitOptions {
        window: WindowPolicy::for_spacing(cfg.grid.h()),
        ..FitOptions::default()
    };
    let fit = fit_scaling_law(&b.t, &b.xi, &opts).unwrap().fit;
    assert!((0.249..=0.259).contains(&fit.t0), "{}", fit.t0);
    assert!((0.46..=0.56).contains(&fit.c1), "{}", fit.c1);
}

#[test]
fn trajectory_and_track_survive_a_round_trip() {
    let mut cfg = shock_a1();
    cfg.time = TimeGrid::with_step(0.05, 0.0005).unwrap();
    let out = run(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();

    write_trajectory(&dir.path().join("snap"), &out.trajectory).unwrap();
    let back = read_trajectory(&dir.path().join("snap")).unwrap();
    assert_eq!(back.config(), out.trajectory.config());
    assert_eq!(back.steps(), out.trajectory.steps());
    for (a, b) in back.snapshots().iter().zip(out.trajectory.snapshots()) {
        assert_eq!(a.t(), b.t());
        assert_eq!(a.values(), b.values());
    }

    let branches = match_tracks(&out.track, 0.2);
    let path = dir.path().join("track.csv");
    write_track_csv(&path, &branches).unwrap();
    let read = read_track_csv(&path).unwrap();
    assert_eq!(read.len(), branches.len());
    for (a, b) in read.iter().zip(&branches) {
        assert_eq!((&a.t, &a.xi), (&b.t, &b.xi));
    }
}
