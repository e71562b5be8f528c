//! Static facts about one accepted program.
//!
//! ```
//! use qlc::{analysis, parser};
//! let program = parser::parse(qlc::corpus::AVERAGE_WITH_LOOP).unwrap();
//! assert_eq!(analysis::loop_extent(&program, 4).unwrap().last_body_line, 7);
//! let scopes = analysis::resolve_scopes(&program);
//! assert_eq!(analysis::declaration_line(&scopes, "sum_positive", 9), Ok(2));
//! ```

mod fingerprint;
mod loops;
mod purpose;
mod roles;
mod scopes;

pub(crate) use fingerprint::sha256_hex;
pub use fingerprint::{fingerprint, StructuralFingerprint};
pub use loops::{enclosing_block_end, loop_extent, loops, LoopInfo, LoopKind, NoLoopAtLine};
pub use purpose::{classify_line_purpose, purposes_at, LinePurpose};
pub use roles::{classify_role, Unclassifiable, VariableRole};
pub use scopes::{declaration_line, resolve_scopes, DeclarationError, ScopeTable, VariableInfo};
