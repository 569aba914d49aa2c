//! Classify every corpus program by profile and list what keeps it out of
//! the base profile.

use qir_toolkit::{corpus, parse_module, validate_profile};

fn main() {
    for (name, text) in corpus::QIR_FILES {
        let report = validate_profile(&parse_module(text).expect("parses"));
        println!("{name}: {}", report.profile);
        for v in report.violations.iter().chain(&report.base_violations).take(3) {
            println!("    {v}");
        }
    }
}
