//! End-to-end acceptance checks for `nisim`. Everything lives in `tests/acceptance.rs`:
//!
//! ```text
//! cargo test -p nisim-validation --test acceptance
//! ```
