//! Parse QIR text, walk the entry point and print it back.
//! Legacy `%Qubit*` spellings come back as opaque `ptr`.

use qir_toolkit::{corpus, parse_module, print_module};

fn main() {
    let module = parse_module(corpus::LEGACY_TYPED).expect("parses");
    for block in &module.entry.blocks {
        println!("block {}: {} instructions", block.label, block.instructions.len());
    }
    for (callee, args) in module.entry_calls() {
        let qubits: Vec<_> = args.iter().filter_map(|a| a.value.static_index()).collect();
        println!("  {callee} {qubits:?}");
    }
    println!("\n{}", print_module(&module));

    // Errors report where they happened.
    let err = parse_module("define void @main() {\nentry:\n  %x = frob i64 1\n  ret void\n}\n").unwrap_err();
    println!("error: {err}");
}
