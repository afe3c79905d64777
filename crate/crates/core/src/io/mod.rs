//! Configuration, experiment presets and file output.

pub mod config;
pub mod plot;
pub mod quantity;
pub mod run;
pub mod table;

pub use config::{load_config, parse_config, ConfigError, Experiment, RunConfig};
pub use plot::{render_line_plot, AxisScale, PlotError, PlotSpec};
pub use quantity::{format_quantity, parse_quantity, Dimension, QuantityError};
pub use run::{run_experiment, run_with_threads, write_outputs, ExperimentOutput, RunError};
pub use table::{Column, ResultTable, TableError};
