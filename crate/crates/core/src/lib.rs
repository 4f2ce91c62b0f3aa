#![no_std]
extern crate alloc;

pub mod demo;
pub mod factory;
pub mod interp;
pub mod kill;
pub mod lang;
pub mod predict;
pub mod seeding;
pub mod sim;
pub mod stats;
pub mod targets;
