//! Experiment driver: configuration, initial data, the global windowed run,
//! checkpoints, contraction ladders, sweeps and region polylines.

mod checkpoint;
mod config;
mod experiments;
mod ic;
mod run;

pub use checkpoint::{Checkpoint, MAGIC, VERSION};
pub use config::{ExponentChoice, IcParams, Preset, RunConfig};
pub use experiments::{
    caption_representatives, emit_region_figures, region_figure, run_picard_experiment, sweep, sweep_csv, sweep_grid,
    ContractionReport, ContractionRow, PicardSettings, RegionFigure, SweepCell, SweepSummary, DELTA_LADDER,
    REGION_HEADER, SWEEP_HEADER,
};
pub use ic::initial_state;
pub use run::{run_global, schedule_window, write_outputs, Regime, RunHistory, RunStatus, ScheduleEntry, SCHEDULE_HEADER};

/// Exit status for a configuration that failed validation.
pub const EXIT_INVALID_CONFIG: i32 = 3;
