//! Property tests for the Pauli algebra invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use vqe_core::pauli::{
    decode_symplectic, encode_symplectic, symplectic_product, Axis, PauliSum, PauliTerm, Phase,
    SymplecticVector,
};

fn axis_strategy() -> impl Strategy<Value = Axis> {
    prop_oneof![
        Just(Axis::I),
        Just(Axis::X),
        Just(Axis::Y),
        Just(Axis::Z)
    ]
}

fn term_strategy(m: usize) -> impl Strategy<Value = PauliTerm> {
    (
        proptest::collection::vec(axis_strategy(), m),
        0u8..4,
    )
        .prop_map(|(axes, ph)| PauliTerm::new(Phase::from_exponent(ph), axes))
}

fn vector_strategy(m: usize) -> impl Strategy<Value = SymplecticVector> {
    (
        proptest::collection::vec(any::<bool>(), m),
        proptest::collection::vec(any::<bool>(), m),
    )
        .prop_map(|(x, z)| SymplecticVector::new(x, z))
}

proptest! {
    #[test]
    fn encode_then_decode_preserves_axes(term in term_strategy(5)) {
        let decoded = decode_symplectic(&encode_symplectic(&term));
        prop_assert_eq!(decoded.axes(), term.axes());
        prop_assert_eq!(decoded.phase(), Phase::ONE);
    }

    #[test]
    fn decode_then_encode_is_identity(v in vector_strategy(5)) {
        let back = encode_symplectic(&decode_symplectic(&v));
        prop_assert_eq!(back, v);
    }

    #[test]
    fn symplectic_product_is_symmetric_and_bilinear(
        a in vector_strategy(4),
        b in vector_strategy(4),
        t in vector_strategy(4),
    ) {
        let ab = symplectic_product(&a, &b).unwrap();
        let ba = symplectic_product(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        // (a + t) x b = a x b + t x b over GF(2)
        let lhs = symplectic_product(&a.add(&t).unwrap(), &b).unwrap();
        let rhs = (ab + symplectic_product(&t, &b).unwrap()) % 2;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiply_is_associative_and_phase_exact(
        p in term_strategy(3),
        q in term_strategy(3),
        r in term_strategy(3),
    ) {
        let left = p.multiply(&q).unwrap().multiply(&r).unwrap();
        let right = p.multiply(&q.multiply(&r).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);

        // phase exactness against the dense product
        let dense_product = p.to_dense().unwrap() * q.to_dense().unwrap() * r.to_dense().unwrap();
        let dense_expected = left.to_dense().unwrap();
        let dev = (dense_product - dense_expected)
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        prop_assert!(dev < 1e-12);
    }

    #[test]
    fn decompose_inverts_to_dense_on_sums(
        coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
        axes in proptest::collection::vec(proptest::collection::vec(axis_strategy(), 3), 6),
    ) {
        let mut sum = PauliSum::new(3);
        for ((re, im), ax) in coeffs.iter().zip(&axes) {
            let term = PauliTerm::new(Phase::ONE, ax.clone());
            sum.add_term(&term, Complex64::new(*re, *im)).unwrap();
        }
        let dense = sum.to_dense().unwrap();
        let back = PauliSum::decompose_dense(&dense, 3).unwrap();
        prop_assert_eq!(back.num_terms(), sum.num_terms());
        for (ax, c) in sum.iter() {
            let axes_str: String = ax.iter().map(|a| a.as_char()).collect();
            let rec = back.coefficient(&axes_str).unwrap();
            prop_assert!((rec - c).norm() < 1e-12);
        }
    }
}
