//! Differential geometry of plane curves: flexes, graph patches, sublevel sets.

pub mod bp;
pub mod dual;
pub mod flex;
pub mod patch;
pub mod sublevel;

pub use bp::{bp_subdivide, BpPiece, Verdict};
pub use dual::{legendre_dual, DualPoint};
pub use flex::{flex_report, FlexOptions, FlexReport, LineIncidence};
pub use patch::{implicit_jet, subdivide_unit_square, Axis, Branch, CurvePatch};
pub use sublevel::{sublevel_measure, SublevelResult};
