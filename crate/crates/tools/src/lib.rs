//! File formats, checkpoints, CSV reports and the experiment runner behind the
//! `inr` command-line tool.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod formats;
pub mod report;
pub mod run;
