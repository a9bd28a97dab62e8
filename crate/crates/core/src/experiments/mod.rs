//! Reproducible experiments: the figure presets and the generic runner behind
//! the command-line tool.
//!
//! Outputs are plot data. CSV files carry `# key=value` metadata lines before
//! the header; JSON documents have the shape `{meta, data}`.

mod config;
mod run;
mod table;

pub use config::{Comparison, ConfigLayer, ExperimentConfig, Format, Preset, Varied, DEFAULT_RUNS, DEFAULT_SEED};
pub use run::{
    compare_histograms, histogram_table, kernel_table, read_histogram, run_distribution_config, run_distribution_preset,
    run_fig1, run_generic, simulate_path, CellResult, CellVariant, Document, HistogramData, HistogramRow,
    IntensityComparison, PresetData, PresetReport, RunMeta, Task, INTENSITY_HEADER, VERSION,
};
pub use table::{Metadata, Table};
