//! Acceptance checks live in `tests/acceptance.rs`. Each check prints one
//! PASS/FAIL line; run them with
//! `cargo test -p rabi-validation -- --test-threads=1` for readable output.
