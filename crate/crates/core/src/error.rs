use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("register width must be at least 1")]
    ZeroWidth,
    #[error("constant {constant} does not fit in {n} bits")]
    ConstantTooWide { constant: u64, n: usize },
    #[error("modulus {modulus} is invalid for width {n}: {reason}")]
    BadModulus {
        modulus: u64,
        n: usize,
        reason: &'static str,
    },
    #[error("base {base} is not coprime to modulus {modulus}")]
    NotCoprime { base: u64, modulus: u64 },
    #[error("window size {m} out of range 1..={max}")]
    WindowOutOfRange { m: usize, max: usize },
    #[error("table has {got} entries, expected {expected}")]
    TableLength { got: usize, expected: usize },
    #[error("gate touches qubit {qubit} but circuit has {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("gate repeats qubit {0}")]
    RepeatedQubit(usize),
    #[error("remap sends two qubits to index {0}")]
    RemapCollision(usize),
    #[error("remap has {got} entries, circuit has {expected} qubits")]
    RemapLength { got: usize, expected: usize },
    #[error("register layout: {0}")]
    Layout(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("basis state has {got} bits, circuit has {expected} qubits")]
    StateLength { got: usize, expected: usize },
    #[error("lowered circuit left basis state {0}")]
    NotPermutation(String),
    #[error("cost formula overflowed for n={n}, m={m}")]
    Overflow { n: usize, m: usize },
    #[error("{0}")]
    Precondition(&'static str),
}
