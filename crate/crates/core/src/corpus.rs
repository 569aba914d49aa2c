//! Sample programs bundled with the crate, used by the examples and tests.

pub const BELL_QASM: &str = include_str!("../corpus/bell.qasm");
/// Bell state with qubits obtained from `__quantum__rt__qubit_allocate_array`.
pub const BELL_DYNAMIC: &str = include_str!("../corpus/bell_dynamic.ll");
/// Bell state addressing qubits through `null` and `inttoptr` constants.
pub const BELL_STATIC: &str = include_str!("../corpus/bell_static.ll");
/// Hadamard on qubits 0..9 through a counted loop over a stack slot.
pub const FOR_LOOP: &str = include_str!("../corpus/for_loop.ll");
/// Conditional X correction on a measured qubit.
pub const FEEDBACK: &str = include_str!("../corpus/feedback.ll");
pub const LEGACY_TYPED: &str = include_str!("../corpus/legacy_typed.ll");
pub const PHI_LOOP: &str = include_str!("../corpus/phi_loop.ll");
pub const EMPTY: &str = include_str!("../corpus/empty.ll");

pub const QIR_FILES: [(&str, &str); 7] = [
    ("bell_dynamic.ll", BELL_DYNAMIC),
    ("bell_static.ll", BELL_STATIC),
    ("for_loop.ll", FOR_LOOP),
    ("feedback.ll", FEEDBACK),
    ("legacy_typed.ll", LEGACY_TYPED),
    ("phi_loop.ll", PHI_LOOP),
    ("empty.ll", EMPTY),
];
