#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use codistflat::dtsys::DiscreteTimeSystem;
use codistflat::extcalc::{parse_codistribution, Codistribution};
use codistflat::symcore::ZeroTest;
use codistflat::sysfile::SystemFile;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.sys"))
}

pub fn fixture_file(name: &str) -> SystemFile {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    SystemFile::parse(&text).expect("fixture parses")
}

pub fn fixture(name: &str) -> DiscreteTimeSystem {
    fixture_file(name)
        .to_system(&ZeroTest::default())
        .expect("fixture is a valid system")
}

/// Parse `span{...}` on the `(x,u)` chart of `sys`.
pub fn codist(sys: &DiscreteTimeSystem, text: &str) -> Codistribution {
    parse_codistribution(text, sys.chart(), &sys.symbol_table(), &ZeroTest::default()).unwrap()
}

pub fn zt() -> ZeroTest {
    ZeroTest::default()
}
