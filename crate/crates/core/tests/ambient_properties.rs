//! Property tests for the ambient structure: the structure equations must
//! hold for every shape, and jet arithmetic must satisfy its ring laws.

use proptest::prelude::*;
use slant_curves::jet::Jet;
use slant_curves::{ManifoldShape, ModelSpace};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Structure equations hold at random samples for every small shape.
    #[test]
    fn axioms_hold_for_all_shapes(m in 1usize..4, s in 1usize..5, seed in 0u64..1000) {
        let space = ModelSpace::new(ManifoldShape::new(m, s).unwrap());
        let report = space.verify_axioms(20, 1e-7, seed);
        prop_assert!(
            report.passed,
            "axioms failed for ({m},{s}) seed {seed}: {:?}",
            report.residuals
        );
    }

    /// Jet multiplication distributes and division inverts it whenever the
    /// divisor has a nonzero value.
    #[test]
    fn jet_ring_laws(
        a in prop::collection::vec(-3.0f64..3.0, 5),
        b in prop::collection::vec(-3.0f64..3.0, 5),
        c in prop::collection::vec(-3.0f64..3.0, 5),
    ) {
        let a = Jet::new(a);
        let mut b = Jet::new(b);
        let c = Jet::new(c);
        // (a + b) * c = a*c + b*c
        let lhs = a.add(&b).mul(&c);
        let rhs = a.mul(&c).add(&b.mul(&c));
        for k in 0..=4 {
            prop_assert!((lhs.deriv(k) - rhs.deriv(k)).abs() < 1e-9 * (1.0 + rhs.deriv(k).abs()));
        }
        // (a * b) / b = a when b(t0) is away from zero
        if b.value().abs() < 0.5 {
            b = b.add(&Jet::constant(1.0, 4));
        }
        let q = a.mul(&b).div(&b);
        for k in 0..=4 {
            prop_assert!(
                (q.deriv(k) - a.deriv(k)).abs() < 1e-6 * (1.0 + a.deriv(k).abs()),
                "order {k}: {} vs {}",
                q.deriv(k),
                a.deriv(k)
            );
        }
    }

    /// The derivative of a product obeys the Leibniz rule order by order.
    #[test]
    fn jet_leibniz_rule(
        a in prop::collection::vec(-3.0f64..3.0, 6),
        b in prop::collection::vec(-3.0f64..3.0, 6),
    ) {
        let a = Jet::new(a);
        let b = Jet::new(b);
        // d(ab) = (da) b + a (db)
        let lhs = a.mul(&b).differentiate();
        let rhs = a.differentiate().mul(&b).add(&a.mul(&b.differentiate()));
        for k in 0..lhs.order().min(rhs.order()) {
            prop_assert!((lhs.deriv(k) - rhs.deriv(k)).abs() < 1e-9 * (1.0 + rhs.deriv(k).abs()));
        }
    }
}
