//! Experiment harnesses built on the solver: non-uniform dependence,
//! Hölder continuity and regression suites. All of them run in `f64`.

mod hoelder;
mod nonuniform;
mod profiles;
mod report;
mod suites;

pub use hoelder::{hoelder_region, run_hoelder, HoelderParams, HoelderRegion};
pub use nonuniform::{
    build_high_freq, build_low_freq_data, check_lemma51, nonuniform_grid, run_nonuniform, Carrier,
    Lemma51Row, Lemma51Table, NonuniformParams,
};
pub use profiles::CutoffProfile;
pub use report::{fit_line, fit_loglog, ExperimentReport, LinearFit, Verdict, VerdictStatus};
pub use suites::{
    calibrate_lifespan_constant, calibration_state, check_size_estimate, run_conservation,
    size_history, ConservationParams, CALIBRATION_AMPLITUDE, CALIBRATION_DT, CALIBRATION_MODES,
    CALIBRATION_N,
};
