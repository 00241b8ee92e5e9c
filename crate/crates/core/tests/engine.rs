use dpc_core::census::{run_census, CensusOptions, Checkpoint, Executor, SearchSpace};
use dpc_core::families::{builtin, reduced_family, CountMode};
use dpc_core::gf::Field;
use dpc_core::Error;

fn dp2_f3() -> SearchSpace {
    let f3 = Field::parse("3").unwrap();
    SearchSpace::new(reduced_family(&builtin("DP2_CLASSIC").unwrap(), &f3), f3)
}

fn opts() -> CensusOptions {
    CensusOptions { executor: Executor::Sequential, epoch: Some(40_000), ..Default::default() }
}

#[test]
fn worker_count_does_not_change_the_report() {
    let space = dp2_f3();
    let base = run_census(&space, &opts()).unwrap();
    for workers in [1, 2, 3, 8] {
        let o = CensusOptions { executor: Executor::with_workers(workers), ..opts() };
        assert_eq!(run_census(&space, &o).unwrap(), base, "{workers} workers");
    }
    assert_eq!(base.scanned, 531_441);
    assert_eq!(base.histogram.values().sum::<u64>(), base.scanned);
}

#[test]
fn interrupted_runs_resume_to_the_same_report() {
    let space = dp2_f3();
    let full = run_census(&space, &opts()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.ckpt");
    let with_cp = CensusOptions { checkpoint: Some(path.clone()), ..opts() };
    for stop in [1, 40_000, 123_457, 400_000] {
        run_census(&space, &CensusOptions { stop_at: Some(stop), ..with_cp.clone() }).unwrap();
        let cp = Checkpoint::load(&path).unwrap().expect("checkpoint written");
        assert_eq!(cp.next_index, stop);
        assert_eq!(cp.partial.scanned, stop);
    }
    assert_eq!(run_census(&space, &with_cp).unwrap(), full);
    assert!(!path.with_extension("tmp").exists());
}

#[test]
fn checkpoint_from_another_space_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.ckpt");
    let with_cp = CensusOptions { checkpoint: Some(path.clone()), stop_at: Some(10), ..opts() };
    run_census(&dp2_f3(), &with_cp).unwrap();

    let other = dp2_f3().pin(0, dpc_core::gf::Elem(1)).unwrap();
    let err = run_census(&other, &with_cp).unwrap_err();
    assert!(matches!(err, Error::CheckpointMismatch { .. }), "{err}");

    let affine = CensusOptions { mode: CountMode::Affine, ..with_cp };
    let err = run_census(&dp2_f3(), &affine).unwrap_err();
    assert!(matches!(err, Error::CheckpointMismatch { .. }), "{err}");
}

#[test]
fn corrupt_checkpoint_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.ckpt");
    std::fs::write(&path, b"{\"schema_version\": 1, \"space_ha").unwrap();
    let err = run_census(&dp2_f3(), &CensusOptions { checkpoint: Some(path), ..opts() }).unwrap_err();
    assert!(matches!(err, Error::Json { .. }), "{err}");
}

#[test]
fn oversized_spaces_are_refused() {
    let err = run_census(&dp2_f3(), &CensusOptions { budget: 531_440, ..opts() }).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { size: 531_441, budget: 531_440 }), "{err}");
    assert!(run_census(&dp2_f3(), &CensusOptions { budget: 531_441, ..opts() }).is_ok());
}
