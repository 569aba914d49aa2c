//! Driving the simulator directly. Bit i of an amplitude index is qubit i.

use qir_toolkit::runtime::StateVector;
use qir_toolkit::GateKind;

fn main() {
    let mut sv = StateVector::new(3);
    sv.apply_gate(GateKind::H, &[], &[0]).unwrap();
    sv.apply_gate(GateKind::Cnot, &[], &[0, 2]).unwrap();
    sv.apply_gate(GateKind::Ry, &[0.5], &[1]).unwrap();
    for (i, a) in sv.amplitudes().iter().enumerate() {
        if a.norm() > 1e-12 {
            println!("|{i:03b}> {a:.4}");
        }
    }
    println!("P(q1 = 1) = {:.4}", sv.prob_one(1));
    let bit = sv.measure(0, 0.9);
    println!("q0 measured {bit}; q2 now has P(1) = {:.4}", sv.prob_one(2));
}
