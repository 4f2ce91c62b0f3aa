//! Bundled sample program, its buggy variant and a test suite.

pub const FRACTION: &str = include_str!("../fixtures/fraction.mj");
pub const FRACTION_BUGGY: &str = include_str!("../fixtures/fraction_buggy.mj");
pub const FRACTION_SUITE: &str = include_str!("../fixtures/fraction_suite.json");

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, validate};

    #[test]
    fn fixtures_are_valid() {
        for src in [FRACTION, FRACTION_BUGGY] {
            let u = parse(src).unwrap();
            let r = validate(&u);
            assert!(r.ok, "{:?}", r.diagnostics);
        }
    }
}
