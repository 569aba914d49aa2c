//! Replace allocation calls with static qubit addresses. Indices are
//! reused once a qubit is released.

use qir_toolkit::transforms::{allocate_static_addresses_with_map, unroll_and_fold};
use qir_toolkit::{corpus, parse_module, print_module};

const REUSE: &str = r#"
define void @main() #0 {
entry:
  %a = call ptr @__quantum__rt__qubit_allocate()
  call void @__quantum__qis__h__body(ptr %a)
  call void @__quantum__qis__mz__body(ptr %a, ptr writeonly null)
  call void @__quantum__rt__qubit_release(ptr %a)
  %b = call ptr @__quantum__rt__qubit_allocate()
  call void @__quantum__qis__x__body(ptr %b)
  ret void
}

declare ptr @__quantum__rt__qubit_allocate()
declare void @__quantum__rt__qubit_release(ptr)
declare void @__quantum__qis__h__body(ptr)
declare void @__quantum__qis__x__body(ptr)
declare void @__quantum__qis__mz__body(ptr, ptr writeonly)

attributes #0 = { "entry_point" }
"#;

fn main() {
    for text in [corpus::BELL_DYNAMIC, REUSE] {
        // Allocation works on single-block modules, so fold first.
        let folded = unroll_and_fold(&parse_module(text).unwrap(), 1024).unwrap();
        let (module, map) = allocate_static_addresses_with_map(&folded).unwrap();
        for (handle, index) in &map.assignments {
            println!("{handle} -> {index}");
        }
        println!("high-water mark {}\n{}", map.high_water_mark, print_module(&module));
    }
}
