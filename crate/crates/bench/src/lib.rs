//! Shared fixtures for the criterion benches.

use bddcso_core::experiment::{parse_config_file, ExperimentConfig};

/// 3D unit-coefficient run with `subs`³ subdomains of `k`³ cells and split `s`.
pub fn cube_config(subs: usize, k: usize, s: usize) -> ExperimentConfig {
    let n = subs * k;
    let precond = if s == 1 { "bddc" } else { "bddc-so" };
    let text = format!(
        "cells = [{n}, {n}, {n}]\nsubdomains = [{subs}, {subs}, {subs}]\nsplit = {{ mode = \"uniform\", s = {s} }}\npreconditioner = \"{precond}\"\nrecipe = \"vef\"\n"
    );
    parse_config_file(&text).expect("valid bench config").remove(0)
}
