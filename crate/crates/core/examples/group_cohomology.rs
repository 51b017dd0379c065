//! Group cohomology from the bar complex, twisted modules, and the
//! hypercohomology of a complex of G-modules.

use cellcoh::equivariant::{equivariant_cohomology, group_cohomology, FinGroup, GComplex, GModule, Twist};
use cellcoh::linalg::{Coef, FinMod, Mat};

fn main() -> cellcoh::Result<()> {
    let z4 = Coef::new(2, 2)?;
    let g = FinGroup::cyclic(2);
    let triv = GModule::trivial(&g, FinMod::free(z4, 1));
    let sign = triv.twist(&Twist::new(&g, z4, vec![1, 3], 1)?);
    for (name, m) in [("trivial", &triv), ("sign", &sign)] {
        let hs: Vec<String> = (0..4).map(|p| group_cohomology(m, p).describe()).collect();
        println!("H^*(Z/2, Z/4 {name}) = {}", hs.join(", "));
    }

    let k = FinGroup::klein();
    let f2 = Coef::new(2, 1)?;
    let hs: Vec<String> = (0..4).map(|p| group_cohomology(&GModule::trivial(&k, FinMod::free(f2, 1)), p).describe()).collect();
    println!("H^*(Z/2 x Z/2, F_2) = {}", hs.join(", "));

    // [R[G] →(1−g) R[G]] for G = Z/3 over F_3.
    let f3 = Coef::new(3, 1)?;
    let c3 = FinGroup::cyclic(3);
    let reg = GModule::regular(&c3, f3);
    let d = Mat::from_rows(f3, 3, &[vec![1, -1, 0], vec![0, 1, -1], vec![-1, 0, 1]])?;
    let b = GComplex::from_modules(&c3, 0, &[reg.clone(), reg], vec![d])?;
    for n in 0..4 {
        println!("H^{n}(Z/3, [F_3[G] → F_3[G]]) = {}", equivariant_cohomology(&b, n)?.describe());
    }
    Ok(())
}
