//! Fusion rules, exact supertile geometry and supertile patches.

mod parse;
mod patch;
mod rule;
mod validate;

pub use parse::{parse_rule, ParseError, ParseErrorKind};
pub use patch::{build_supertile, Node, Patch, Side, Transform, DEFAULT_TILE_BUDGET};
pub use rule::{
    FusionRule, Involution, LengthSymbol, LevelTable, LinearExpr, Placement, SizeRow, SizeTable,
    TileLabel,
};
pub use validate::{validate_rule, Rect, ValidationReport, Violation, ViolationKind};
