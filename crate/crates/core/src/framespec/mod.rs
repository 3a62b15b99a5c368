//! Frame specification documents and the expression language for
//! per-coordinate components.

mod doc;
pub mod expr;
mod spec;

pub use expr::{evaluate, parse_expr, BinOp, Expr, Func};
pub use spec::{load_spec, load_spec_path, materialize, write_spec, Family, FrameSpec, MeasureDecl};
