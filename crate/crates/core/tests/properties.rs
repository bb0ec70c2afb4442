use crystal_core::bfield::valid_bfield_space;
use crystal_core::charsub::{find_rescaling, validate};
use crystal_core::{
    extend_by_bfield, make_extension, ogus_basis, power_twist, restrict, BFieldClass, CharDatum, FieldElement,
    GaloisField,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn element(f: &GaloisField, seed: u64) -> FieldElement {
    f.element_at(seed % f.size().unwrap())
}

fn random_bfield(d: &CharDatum, basis: &[Vec<FieldElement>], rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    let f = d.field();
    let mut b = vec![f.zero(); d.space().dim()];
    for v in basis {
        let c = f.from_u64(rng.gen_range(0..f.p()));
        for (x, y) in b.iter_mut().zip(v) {
            *x += &(&c * y);
        }
    }
    b
}

proptest! {
    #[test]
    fn field_axioms_gf3_5(x in 0u64..243, y in 0u64..243, z in 0u64..243) {
        let f = make_extension(3, 5).unwrap();
        let (x, y, z) = (element(&f, x), element(&f, y), element(&f, z));
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!((&x * &y).frobenius(), &x.frobenius() * &y.frobenius());
        prop_assert_eq!(x.frobenius_pow(5), x.clone());
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn rebuilt_data_are_strict(a1 in 0u64..3, a2 in 0u64..3) {
        let d = crystal_core::charsub::from_prime_constants(3, 3, &[a1, a2]).unwrap();
        let check = validate(d.k(), d.space()).unwrap();
        prop_assert!(check.is_characteristic && check.is_strict);
        let ob = ogus_basis(&d).unwrap();
        let f = d.field();
        let orig = vec![f.from_u64(a1), f.from_u64(a2)];
        prop_assert!(find_rescaling(f, &ob.a, &orig, 3).unwrap().is_some());
    }
}

#[test]
fn bfield_round_trips_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (s, a) in [(1usize, vec![]), (2, vec![0u64]), (2, vec![1])] {
        let d = crystal_core::charsub::from_prime_constants(3, s, &a).unwrap();
        let basis = valid_bfield_space(&d).unwrap();
        for _ in 0..6 {
            let b = BFieldClass::new(d.clone(), random_bfield(&d, &basis, &mut rng)).unwrap();
            let ed = extend_by_bfield(&b).unwrap();
            assert!(ed.in_range_of(&d).unwrap());
            assert_eq!(restrict(&ed).unwrap(), b);
            for l in 1..3 {
                assert_eq!(power_twist(&ed, l).unwrap(), extend_by_bfield(&b.scale(l).unwrap()).unwrap());
            }
        }
    }
}
