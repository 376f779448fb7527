//! Acceptance checks for `epcharge`. The suite itself is the `acceptance`
//! test target; run it with `cargo test -p epcharge-verify --test acceptance`.
