//! Holds the acceptance suite (`cargo test -p wigner-validation --test acceptance`).
//! It lives in its own package so that cargo runs it after every other test binary.
