//! Instance files, generators, the worked-example registry and reproduction runs.

pub mod generate;
pub mod io;
pub mod registry;
pub mod reproduce;

pub use generate::{generate_instance, generate_pair, GenKind};
pub use io::{
    instance_to_json, load_instance, parse_instance, read_instance, save_instance, save_report, InstanceMeta,
};
pub use reproduce::{reproduce, reproduce_all, FactResult, ReproductionReport};
