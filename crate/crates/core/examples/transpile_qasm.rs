//! OpenQASM 2 to QIR and back.

use qir_toolkit::circuit::{circuit_from_base_qir, export_openqasm2, import_openqasm2_with_warnings};
use qir_toolkit::transforms::lower_to_base;
use qir_toolkit::{corpus, parse_module};

const GHZ: &str = r#"OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
creg c[3];
h q[0];
cx q[0], q[1];
cx q[1], q[2];
barrier q;
rz(pi/8) q[2];
measure q -> c;
"#;

fn main() {
    let (circuit, warnings) = import_openqasm2_with_warnings(GHZ).unwrap();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let module = qir_toolkit::circuit::circuit_to_base_qir(&circuit);
    println!("{}", qir_toolkit::print_module(&module));
    println!("{}", export_openqasm2(&circuit_from_base_qir(&module).unwrap()));

    // Adaptive QIR goes through lowering first.
    let base = lower_to_base(&parse_module(corpus::BELL_DYNAMIC).unwrap()).unwrap();
    print!("{}", export_openqasm2(&circuit_from_base_qir(&base).unwrap()));
}
