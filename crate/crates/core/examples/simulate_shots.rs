//! Sampling with reproducible seeds. Each shot draws from its own stream,
//! so results do not depend on how shots are scheduled.

use qir_toolkit::runtime::{interpret, run_shot, RuntimeOptions};
use qir_toolkit::{corpus, parse_module};

fn main() {
    let module = parse_module(corpus::FEEDBACK).unwrap();
    let opts = RuntimeOptions::default();
    let result = interpret(&module, 2000, 7, &opts).unwrap();
    println!("{}", result.to_json(false));
    assert_eq!(result, interpret(&module, 2000, 7, &opts).unwrap());

    let trace = run_shot(&parse_module(corpus::BELL_DYNAMIC).unwrap(), 7, 0, &opts).unwrap();
    println!("shot 0: {} (peak {} qubits)", trace.bits, trace.peak_qubits);
    for (i, a) in trace.pre_measurement.amplitudes().iter().enumerate() {
        println!("  |{i:02b}> {a:.4}");
    }
}
