use holocirc::circulant::Circulant;
use holocirc::holomorph::{crt_decompose, crt_map, units, AffineMap, HolElem2};
use holocirc::numtheory::{val2, Modulus2n};
use holocirc::permgroup::{Perm, StabilizerChain};
use proptest::prelude::*;

fn hol_elem() -> impl Strategy<Value = HolElem2> {
    (3u32..=9).prop_flat_map(|n| {
        (0..HolElem2::group_order(n) as usize).prop_map(move |i| HolElem2::from_index(n, i))
    })
}

fn hol_triple() -> impl Strategy<Value = (HolElem2, HolElem2, HolElem2)> {
    (3u32..=9).prop_flat_map(|n| {
        let size = HolElem2::group_order(n) as usize;
        (0..size, 0..size, 0..size).prop_map(move |(i, j, k)| {
            (HolElem2::from_index(n, i), HolElem2::from_index(n, j), HolElem2::from_index(n, k))
        })
    })
}

fn affine_pair() -> impl Strategy<Value = (AffineMap, AffineMap)> {
    (2u64..=60).prop_flat_map(|n| {
        let us = units(n);
        let k = us.len();
        (0..n, 0..k, 0..n, 0..k).prop_map(move |(t1, i, t2, j)| {
            (AffineMap::new(n, t1, us[i]).unwrap(), AffineMap::new(n, t2, us[j]).unwrap())
        })
    })
}

fn circulant() -> impl Strategy<Value = (Circulant, u64)> {
    (4usize..=14).prop_flat_map(|n| {
        let us = units(n as u64);
        let k = us.len();
        (0..(1u64 << (n / 2)), 0..k).prop_map(move |(mask, i)| (Circulant::from_pair_mask(n, mask).unwrap(), us[i]))
    })
}

proptest! {
    #[test]
    fn composition_is_associative((f, g, h) in hol_triple()) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn composition_matches_pointwise((f, g, _) in hol_triple()) {
        let fg = f.compose(&g).unwrap();
        for p in 0..f.modulus() {
            prop_assert_eq!(fg.act(p), g.act(f.act(p)));
        }
    }

    #[test]
    fn power_matches_fold(h in hol_elem(), r in 0i64..300) {
        let mut acc = HolElem2::identity(h.ring().exponent()).unwrap();
        for _ in 0..r {
            acc = acc.compose(&h).unwrap();
        }
        prop_assert_eq!(h.power(r), acc);
        prop_assert_eq!(h.power(-r), acc.inverse());
    }

    #[test]
    fn order_is_minimal(h in hol_elem()) {
        let o = h.order() as i64;
        prop_assert!(h.power(o).is_identity());
        prop_assert!(o.count_ones() == 1);
        if o > 1 {
            prop_assert!(!h.power(o / 2).is_identity());
        }
        prop_assert_eq!(h.order() as u128, h.to_perm().order());
    }

    #[test]
    fn affine_round_trip(h in hol_elem()) {
        let f = h.to_affine();
        prop_assert_eq!(HolElem2::from_affine(&f).unwrap(), h);
        prop_assert_eq!(AffineMap::from_perm(&h.to_perm()), Some(f));
        let parsed = HolElem2::parse(&h.to_string(), h.ring().exponent()).unwrap();
        prop_assert_eq!(parsed, h);
    }

    #[test]
    fn conjugation_by_normal_form_rho((h, w, _) in hol_triple()) {
        let (nf, rho) = h.conj_normal_form();
        prop_assert_eq!(h.conjugate_by(&rho.inverse()).unwrap(), nf);
        // conjugation preserves order
        prop_assert_eq!(h.conjugate_by(&w).unwrap().order(), h.order());
    }

    #[test]
    fn affine_perm_homomorphism((f, g) in affine_pair()) {
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(fg.to_perm(), f.to_perm().compose(&g.to_perm()));
        prop_assert_eq!(f.inverse().compose(&f).unwrap(), AffineMap::identity(f.modulus));
        prop_assert_eq!(f.order() as u128, f.to_perm().order());
    }

    #[test]
    fn crt_is_a_homomorphism((f, g) in affine_pair()) {
        let frame = crt_decompose(f.modulus).unwrap();
        let fg = crt_map(&frame, &f.compose(&g).unwrap()).unwrap();
        let parts_f = crt_map(&frame, &f).unwrap();
        let parts_g = crt_map(&frame, &g).unwrap();
        for ((a, b), c) in parts_f.iter().zip(&parts_g).zip(&fg) {
            prop_assert_eq!(a.compose(b).unwrap(), *c);
        }
        prop_assert_eq!(frame.unmap(&parts_f).unwrap(), f);
    }

    #[test]
    fn val2_splits(m in 1u128..1 << 100) {
        let s = val2(m).unwrap();
        prop_assert_eq!(s.two_part * s.odd_part, m);
        prop_assert!(s.odd_part % 2 == 1 && s.two_part.is_power_of_two());
    }

    #[test]
    fn odd_inverse(n in 1u32..=63, u in any::<u64>()) {
        let ring = Modulus2n::new(n).unwrap();
        let u = ring.reduce((u | 1) as u128);
        let v = ring.inverse_odd(u).unwrap();
        prop_assert_eq!(ring.mul(u, v), 1 % ring.modulus());
    }

    #[test]
    fn automorphism_group_is_consistent((g, u) in circulant()) {
        let aut = g.automorphism_group().unwrap();
        for p in &aut.generators {
            prop_assert!(g.is_automorphism(p.images()));
        }
        // an independent order from the generators
        let chain = StabilizerChain::new(g.modulus(), &aut.generators);
        prop_assert_eq!(chain.order(), aut.order);
        prop_assert!(chain.contains(&Perm::rotation(g.modulus())));
        // normal iff the automorphism group is the affine part
        prop_assert_eq!(aut.normalises_translations(g.modulus()), aut.within_holomorph);
        // multiplying S by a unit gives an isomorphic graph
        let n = g.modulus() as u64;
        let relabelled = Circulant::new(g.modulus(), g.connection_set().iter().map(|s| s * u % n)).unwrap();
        let other = relabelled.automorphism_group().unwrap();
        prop_assert_eq!(other.order, aut.order);
        prop_assert_eq!(relabelled.is_normal_cayley().unwrap(), aut.normalises_translations(g.modulus()));
        prop_assert_eq!(relabelled.aut_g_s().len(), g.aut_g_s().len());
    }
}
