pub mod cli;
pub mod config;
pub mod sigma;
pub mod sweep;
pub mod system;

pub use config::{log_grid, Config, Rotor, Solver};
pub use sigma::{
    format_scan, is_complete, run_scan, scan_sigma, ScanOutcome, ScanRow, ScanSpec, Units,
    COMPLETE_MARKER,
};
pub use sweep::{
    find_lambda_for_as, sweep_lambda, DivergenceWindow, Pole, PoleReport, Sweep, SweepRow,
};
pub use system::{build_dimer, build_surface, Cell, System};
