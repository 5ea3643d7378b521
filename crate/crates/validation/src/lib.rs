//! Acceptance suite for `dpc-core`. The criteria live in `tests/acceptance.rs`
//! and run with `cargo test -p dpc-validation --test acceptance`.
