//! Holds the acceptance target in `tests/acceptance.rs`; no library code.
