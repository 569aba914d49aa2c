//! Partial evaluation: a counted loop becomes straight-line code. A cap
//! below the trip count is an error.

use qir_toolkit::transforms::{unroll_and_fold, DEFAULT_ITERATION_CAP};
use qir_toolkit::{corpus, parse_module, print_module};

fn main() {
    let module = parse_module(corpus::FOR_LOOP).expect("parses");
    let unrolled = unroll_and_fold(&module, DEFAULT_ITERATION_CAP).expect("loop has a constant bound");
    println!("{}", print_module(&unrolled));

    match unroll_and_fold(&module, 5) {
        Ok(_) => unreachable!("ten iterations exceed a cap of five"),
        Err(e) => println!("cap 5: {e}"),
    }

    // Phi-based loops fold the same way.
    let phi = unroll_and_fold(&parse_module(corpus::PHI_LOOP).expect("parses"), DEFAULT_ITERATION_CAP).unwrap();
    println!("{}", print_module(&phi));
}
