//! Rule and substitution files shipped with the crate.

use crate::fusion::{parse_rule, FusionRule};
use crate::subst::Substitution;
use crate::{Error, Result};

pub const FRANK_DPV_RULE: &str = include_str!("../rules/frank-dpv.rule");
pub const EXAMPLE2_RULE: &str = include_str!("../rules/example2.rule");
pub const NORTH_SUBST: &str = include_str!("../rules/north.subst");
pub const SOUTH_SUBST: &str = include_str!("../rules/south.subst");
pub const EXAMPLE2_NORTH_SUBST: &str = include_str!("../rules/example2-north.subst");
pub const EXAMPLE2_SOUTH_SUBST: &str = include_str!("../rules/example2-south.subst");

/// Names accepted by [`rule`].
pub const RULE_NAMES: [&str; 2] = ["frank-dpv", "example2"];

/// Names accepted by [`substitution`].
pub const SUBST_NAMES: [&str; 4] = ["north", "south", "example2-north", "example2-south"];

pub fn rule_source(name: &str) -> Option<&'static str> {
    match name {
        "frank-dpv" => Some(FRANK_DPV_RULE),
        "example2" => Some(EXAMPLE2_RULE),
        _ => None,
    }
}

pub fn rule(name: &str) -> Result<FusionRule> {
    let src = rule_source(name).ok_or_else(|| Error::Invalid(format!("no bundled rule `{name}`")))?;
    Ok(parse_rule(src)?)
}

pub fn subst_source(name: &str) -> Option<&'static str> {
    match name {
        "north" => Some(NORTH_SUBST),
        "south" => Some(SOUTH_SUBST),
        "example2-north" => Some(EXAMPLE2_NORTH_SUBST),
        "example2-south" => Some(EXAMPLE2_SOUTH_SUBST),
        _ => None,
    }
}

pub fn substitution(name: &str) -> Result<Substitution> {
    let src =
        subst_source(name).ok_or_else(|| Error::Invalid(format!("no bundled substitution `{name}`")))?;
    Substitution::parse(src)
}

pub fn frank_dpv() -> FusionRule {
    rule("frank-dpv").expect("bundled rule parses")
}

pub fn example2() -> FusionRule {
    rule("example2").expect("bundled rule parses")
}

/// Bottom-row substitution `σ_n` of the DPV tiling.
pub fn north() -> Substitution {
    substitution("north").expect("bundled substitution parses")
}

/// Top-row substitution `σ_s` of the DPV tiling.
pub fn south() -> Substitution {
    substitution("south").expect("bundled substitution parses")
}
