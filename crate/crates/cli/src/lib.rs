//! Configuration, suite execution and machine-readable reporting for the
//! `hyperhs` command-line tool.

pub mod config;
pub mod suite;

pub use config::{default_seed, parse_param, CheckSpec, ConfigError, Format, SuiteConfig, DEFAULT_SEED, SEED_ENV};
pub use suite::{emit_report, parse_json, run_suite, CheckResult, Status, SuiteResult, Summary};
