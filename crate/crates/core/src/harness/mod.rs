//! Monte Carlo harness: critical values, power and level studies, ranking
//! and CSV reports.

pub mod config;
pub mod critical;
pub mod power;
pub mod rank;
pub mod report;
pub mod single;

pub use config::StudyConfig;
pub use critical::{simulate_critical_values, simulate_direct, simulate_normalized, CriticalKey, CriticalValueTable};
pub use power::{run_level_study, run_power_study};
pub use rank::{rank_summary, RankMatrix};
pub use report::{emit_report, PowerRow, PowerTable};
pub use single::{sample_critical_values, test_sample, CellResult};
