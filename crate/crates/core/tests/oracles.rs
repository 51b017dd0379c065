mod common;

use cellcoh::corpus;
use cellcoh::equivariant::{group_cohomology, FinGroup, GModule, Twist};
use cellcoh::linalg::{Coef, FinMod};
use cellcoh::space::{sheaf_cohomology, WCSheaf};

use common::{oracle_profile, profile_of_factors, simplicial_cohomology_order, ActedGroup};

fn z(l: u64, m: u32) -> Coef {
    Coef::new(l, m).unwrap()
}

fn check_simplicial(facets: &[Vec<usize>], coef: Coef) {
    let (space, faces) = corpus::face_space(&facets.to_vec()).unwrap();
    let f = WCSheaf::constant(&space, coef);
    let top = faces.iter().map(Vec::len).max().unwrap() - 1;
    for q in 0..=top + 1 {
        let ours = coef.l().pow(sheaf_cohomology(&f, q as i64).order_exp() as u32);
        let theirs = simplicial_cohomology_order(&faces, q, coef.modulus());
        assert_eq!(ours, theirs, "{facets:?} over {coef}, degree {q}");
    }
}

#[test]
fn face_posets_match_simplicial_cochains() {
    for facets in corpus::small_complexes(4) {
        for coef in [z(2, 1), z(2, 2), z(3, 1)] {
            check_simplicial(&facets, coef);
        }
    }
}

#[test]
fn five_vertex_complexes_match_simplicial_cochains() {
    for facets in corpus::random_complexes(5, 12, 2, 17) {
        check_simplicial(&facets, z(2, 1));
    }
}

fn acted(m: &GModule) -> ActedGroup {
    assert!(m.module().is_free());
    let g = m.group();
    ActedGroup {
        moduli: vec![m.coef().modulus(); m.rank()],
        table: g.table().to_vec(),
        action: (0..g.order()).map(|x| m.action(x).to_rows()).collect(),
    }
}

#[test]
fn group_cohomology_matches_cochain_enumeration() {
    for g in FinGroup::small_groups() {
        let mut mods = Vec::new();
        for coef in [z(2, 1), z(2, 2), z(3, 1)] {
            mods.push(GModule::trivial(&g, FinMod::free(coef, 1)));
            if g.order() <= 3 {
                mods.push(GModule::regular(&g, coef));
            }
        }
        if g.order() % 2 == 0 {
            // χ(x) = -1 on odd-indexed elements; a character for Z/2, Z/4 and the Klein group.
            let k = z(2, 2);
            let chi = (0..g.order()).map(|x| if x % 2 == 0 { 1 } else { 3 }).collect();
            let t = Twist::new(&g, k, chi, 1).unwrap();
            mods.push(GModule::trivial(&g, FinMod::free(k, 1)).twist(&t));
        }
        for m in &mods {
            let a = acted(m);
            let coef = m.coef();
            for p in 0..=2 {
                let ours = profile_of_factors(&group_cohomology(m, p).invariant_factors(), coef.m());
                let (theirs, how) = oracle_profile(&a, p, coef.l(), coef.m());
                assert_eq!(ours, theirs, "{} acting on rank {} over {coef}, p = {p} ({how})", g.name(), m.rank());
            }
        }
    }
}
