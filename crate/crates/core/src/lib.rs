//! Relative-motion dynamics, formation planning, station-keeping budgets and
//! coordinated pointing schedules for NanoSat constellations built from
//! "wheel" fleets flying in string-of-pearls along a common track.
//!
//! Each capability has a runnable program under `examples/`; the
//! `pearlwheel` binary wraps the same entry points in [`commands`].

// NaN-rejecting guards are written as `!(x > 0.0)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod relmotion;
pub mod lp;
pub mod assignment;
pub mod config;
pub mod constellation;
pub mod planner;
pub mod upkeep;
pub mod scheduler;
pub mod commands;
