#![allow(dead_code)]
pub mod cw;
pub mod sched;
