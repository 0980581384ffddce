//! End-to-end: symbolic expansion, numeric propagation and dimer enumeration agree.

use std::collections::HashMap;

use hexahedron::dimer::verify_bijection;
use hexahedron::recurrence::{propagate_point, symbolic_field, LatticeField};
use hexahedron::surface::SteppedSolid;
use hexahedron::{HalfLatticePoint, LaurentPoly, VarName, VarTable};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn apex_floor(s: &SteppedSolid) -> (Vec<HalfLatticePoint>, i32) {
    let w = s.default_window(2).unwrap();
    (s.surface_labels(&w).into_iter().collect(), w.lo.iter().sum::<i32>() - 3)
}

fn symbolic_apex(s: &SteppedSolid, t: &VarTable) -> LaurentPoly {
    let (labels, floor) = apex_floor(s);
    let mut f = symbolic_field(t, labels);
    propagate_point(&mut f, HalfLatticePoint::vertex([0, 0, 0]), floor).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // evaluating the Laurent expansion equals propagating the numbers
    #[test]
    fn expansion_commutes_with_evaluation(cubes in 1usize..=3, seed in proptest::collection::vec((1i64..20, 1i64..6), 64)) {
        let s = SteppedSolid::first_cubes(cubes);
        let t = VarTable::new();
        let apex = symbolic_apex(&s, &t);
        let (labels, floor) = apex_floor(&s);
        let mut numeric = LatticeField::new();
        let mut point = HashMap::new();
        for (i, p) in labels.iter().enumerate() {
            let (n, d) = seed[i % seed.len()];
            let v = BigRational::new(n.into(), d.into());
            numeric.insert(*p, v.clone());
            if let Some(x) = t.lookup(&VarName::Point(*p)) {
                point.insert(x, v);
            }
        }
        let direct = propagate_point(&mut numeric, HalfLatticePoint::vertex([0, 0, 0]), floor).unwrap();
        prop_assert_eq!(apex.eval(&point).unwrap(), direct);
    }
}

#[test]
fn unit_values_count_weighted_configurations() {
    for n in 1..=3 {
        let s = SteppedSolid::first_cubes(n);
        let rep = verify_bijection(&s, 2).unwrap();
        assert!(rep.matches(), "{n} cubes: {:?}", rep.mismatches);
        let t = rep.recurrence_side.table().clone();
        let apex = symbolic_apex(&s, &t);
        let unit: BigRational = apex.terms().map(|(_, c)| c.clone()).sum();
        assert_eq!(unit, BigRational::from_integer(rep.weighted_sum.clone()));
        assert!(rep.weighted_sum >= BigInt::from(rep.configs));
    }
}

#[test]
fn removed_cube_orders_are_up_sets() {
    // removing the listed corners one at a time gives the same solid as the prefix
    let four = SteppedSolid::first_cubes(4);
    let again = SteppedSolid::corner_without(four.removed.iter().copied().collect::<Vec<_>>()).unwrap();
    assert_eq!(four.removed, again.removed);
    assert_eq!(four.removed, SteppedSolid::u_minus(2).removed);
}
