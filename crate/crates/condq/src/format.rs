//! System definition files and exact rational parsing.
//!
//! Rationals are written as integer strings `"a"` or fractions `"a/b"`.
//! Decimal and scientific literals are rejected so that a system file can
//! never silently lose exactness.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use std::str::FromStr;
use serde::Deserialize;

use condensation::system::{CondensationSystem, Interval, Similitude};
use condensation::Rational;

/// One affine map as written in a system file.
#[derive(Debug, Clone, Deserialize)]
pub struct MapSpec {
    pub scale: String,
    pub offset: String,
}

/// JSON schema of a system definition file.
///
/// `outer_probs` lists the condensation probability first; all numbers are
/// exact rational strings.
#[derive(Debug, Clone, Deserialize)]
pub struct SystemFile {
    pub outer_maps: Vec<MapSpec>,
    pub outer_probs: Vec<String>,
    pub inner_maps: Vec<MapSpec>,
    pub inner_probs: Vec<String>,
    pub open_set: OpenSetSpec,
}

#[derive(Debug, Clone, Deserialize)]
pub struct OpenSetSpec {
    pub lo: String,
    pub hi: String,
}

/// Parses `"a"` or `"a/b"` exactly; anything else (decimals, exponents,
/// empty strings) is an error.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty rational literal".into());
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(format!(
            "decimal literals are not accepted, write '{s}' as an exact fraction a/b"
        ));
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num_str).map_err(|e| format!("bad numerator '{num_str}': {e}"))?;
    let den = BigInt::from_str(den_str).map_err(|e| format!("bad denominator '{den_str}': {e}"))?;
    if den == BigInt::from(0) {
        return Err(format!("zero denominator in '{s}'"));
    }
    Ok(Rational::new(num, den))
}

fn parse_map(spec: &MapSpec) -> Result<Similitude, String> {
    Similitude::new(parse_rational(&spec.scale)?, parse_rational(&spec.offset)?)
        .map_err(|e| e.to_string())
}

/// Loads and structurally validates a system file.
pub fn load_system(path: &Path) -> Result<CondensationSystem, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: SystemFile =
        serde_json::from_str(&text).map_err(|e| format!("bad system file: {e}"))?;
    system_from_file(&file)
}

pub fn system_from_file(file: &SystemFile) -> Result<CondensationSystem, String> {
    let outer = file
        .outer_maps
        .iter()
        .map(parse_map)
        .collect::<Result<Vec<_>, _>>()?;
    let inner = file
        .inner_maps
        .iter()
        .map(parse_map)
        .collect::<Result<Vec<_>, _>>()?;
    let outer_probs = file
        .outer_probs
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>, _>>()?;
    let inner_probs = file
        .inner_probs
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>, _>>()?;
    let open_set = Interval::open(
        parse_rational(&file.open_set.lo)?,
        parse_rational(&file.open_set.hi)?,
    )
    .map_err(|e| e.to_string())?;
    CondensationSystem::new(outer, outer_probs, inner, inner_probs, open_set)
        .map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use condensation::ratio;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/4").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("0").unwrap(), ratio(0, 1));
        assert_eq!(parse_rational("-3/9").unwrap(), ratio(-1, 3));
        assert_eq!(parse_rational(" 13/24 ").unwrap(), ratio(13, 24));
        assert!(parse_rational("0.25").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn loads_a_demo_file() {
        let json = r#"{
            "outer_maps": [
                {"scale": "1/4", "offset": "0"},
                {"scale": "1/4", "offset": "3/4"}
            ],
            "outer_probs": ["1/3", "1/3", "1/3"],
            "inner_maps": [
                {"scale": "1/8", "offset": "1/3"},
                {"scale": "1/8", "offset": "13/24"}
            ],
            "inner_probs": ["1/2", "1/2"],
            "open_set": {"lo": "0", "hi": "1"}
        }"#;
        let file: SystemFile = serde_json::from_str(json).unwrap();
        let sys = system_from_file(&file).unwrap();
        assert_eq!(sys, condensation::fixtures::demo_system());
    }

    #[test]
    fn rejects_decimal_in_file() {
        let json = r#"{
            "outer_maps": [{"scale": "0.25", "offset": "0"}],
            "outer_probs": ["1/2", "1/2"],
            "inner_maps": [{"scale": "1/8", "offset": "1/3"}, {"scale": "1/8", "offset": "13/24"}],
            "inner_probs": ["1/2", "1/2"],
            "open_set": {"lo": "0", "hi": "1"}
        }"#;
        let file: SystemFile = serde_json::from_str(json).unwrap();
        assert!(system_from_file(&file).unwrap_err().contains("fraction"));
    }
}
