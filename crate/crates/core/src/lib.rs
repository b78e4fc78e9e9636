#![no_std]
//! Core numerics for diagonal-entropy quench studies.

extern crate alloc;

pub mod error;
pub mod partition;
pub mod perturbation;
pub mod spectral;
pub mod dynamics;
pub mod expansion;
pub mod models;
pub mod symmetric;

pub use error::{Error, Result};
