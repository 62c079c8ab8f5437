//! Problem specs shipped with the binary.

use crate::spec::{parse_spec, ProblemSpec};
use crate::{CliError, CliResult};

pub const PRESETS: [(&str, &str); 6] = [
    ("quadratic", include_str!("../presets/quadratic.json")),
    ("dirac", include_str!("../presets/dirac.json")),
    ("fuchsian-t1", include_str!("../presets/fuchsian-t1.json")),
    ("fuchsian-t2", include_str!("../presets/fuchsian-t2.json")),
    ("coboundary", include_str!("../presets/coboundary.json")),
    ("pogorelov-d3k2", include_str!("../presets/pogorelov-d3k2.json")),
];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

pub fn preset(name: &str) -> CliResult<ProblemSpec> {
    let (_, text) = PRESETS
        .iter()
        .find(|p| p.0 == name)
        .ok_or_else(|| CliError::Usage(format!("unknown preset `{name}`; available: {}", names().join(", "))))?;
    parse_spec(text, &format!("preset {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in names() {
            preset(name).unwrap();
        }
        assert!(matches!(preset("nope"), Err(CliError::Usage(_))));
    }
}
