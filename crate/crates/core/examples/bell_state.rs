//! End to end: import an OpenQASM Bell circuit, emit base-profile QIR and
//! sample it.
//!
//! ```bash
//! cargo run --example bell_state
//! ```

use qir_toolkit::circuit::{circuit_to_base_qir, import_openqasm2};
use qir_toolkit::runtime::{interpret, RuntimeOptions};
use qir_toolkit::{corpus, print_module};

fn main() {
    let circuit = import_openqasm2(corpus::BELL_QASM).expect("valid OpenQASM");
    let module = circuit_to_base_qir(&circuit);
    println!("{}", print_module(&module));

    let result = interpret(&module, 1000, 42, &RuntimeOptions::default()).expect("runs");
    for (bits, n) in &result.counts {
        println!("{bits}: {n}");
    }
}
