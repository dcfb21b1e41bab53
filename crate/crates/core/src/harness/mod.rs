//! Experiment configs, orchestration and result persistence.

mod config;
mod emit;
mod record;
mod run;

pub use config::{
    resolve_seed, BlockForm, Constants, DecouplingTarget, Experiment, ExperimentConfig, OutputSection, PolySection,
    RunSection, KINDS, SEED_ENV,
};
pub use emit::{
    csv_row, detail, emit, from_json, render, strip_wall_time, to_csv, to_json, to_plotdata, Format, CSV_HEADER,
    PLOT_HEADER,
};
pub use record::{Assertion, Point, ResultRecord};
pub use run::{calibrate, run_experiment, Calibration};

/// Writes every output the config asks for.
pub fn write_outputs(cfg: &ExperimentConfig, records: &[ResultRecord]) -> crate::Result<()> {
    if let Some(p) = &cfg.output.csv {
        emit(records, Format::Csv, p)?;
    }
    if let Some(p) = &cfg.output.json {
        emit(records, Format::Json, p)?;
    }
    if let Some(p) = &cfg.output.plotdata {
        emit(records, Format::Plotdata, p)?;
    }
    Ok(())
}
