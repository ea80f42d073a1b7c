use proptest::prelude::*;
use shorcnot::qasm::{from_qasm, to_qasm};
use shorcnot::registry::{CircuitKind, CircuitSpec};

proptest! {
    #[test]
    fn export_round_trips(kind in prop::sample::select(CircuitKind::ALL.to_vec()), n in 2usize..=5) {
        let mut spec = CircuitSpec::new(kind, n).modulus((1 << n) - 1);
        spec.base = Some(2);
        spec.window = Some(2);
        let c = spec.build().unwrap();
        let back = from_qasm(&to_qasm(&c)).unwrap();
        prop_assert_eq!(back.normalized_cnot_count(), c.normalized_cnot_count());
        prop_assert_eq!(back, c);
    }
}
