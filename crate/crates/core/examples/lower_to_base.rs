//! The full lowering pipeline, and the programs it refuses.

use qir_toolkit::transforms::lower_to_base;
use qir_toolkit::{corpus, parse_module, print_module, validate_profile};

fn main() {
    let lowered = lower_to_base(&parse_module(corpus::BELL_DYNAMIC).unwrap()).unwrap();
    println!("{}", validate_profile(&lowered).profile);
    println!("{}", print_module(&lowered));

    // A branch on a measurement outcome cannot be flattened.
    let err = lower_to_base(&parse_module(corpus::FEEDBACK).unwrap()).unwrap_err();
    println!("{err}");
    assert_eq!(err.kind(), "FeedbackRequired");
}
