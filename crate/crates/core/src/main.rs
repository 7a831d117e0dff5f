//! Binary entry point; all behavior lives in [`piqp::cli`].

use std::process::exit;

fn main() {
    exit(piqp::cli::run());
}
