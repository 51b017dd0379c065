//! Yoneda 2-extensions: classes in Ext², pullback along a map, and the
//! full comparison for a short exact sequence of G-complexes.

use cellcoh::corpus;
use cellcoh::equivariant::{FinGroup, GModule};
use cellcoh::linalg::{Coef, FinMod, Mat};
use cellcoh::yoneda::{class_of, pullback, theorem31_pipeline, TwoExt};

fn main() -> cellcoh::Result<()> {
    let f2 = Coef::new(2, 1)?;
    let g = FinGroup::cyclic(2);
    let triv = GModule::trivial(&g, FinMod::free(f2, 1));
    let reg = GModule::regular(&g, f2);

    // 0 → F_2 → F_2[G] →(1−g) F_2[G] → F_2 → 0
    let alpha = Mat::from_rows(f2, 2, &[vec![1, 1]])?;
    let beta = Mat::from_rows(f2, 2, &[vec![1, 1], vec![1, 1]])?;
    let gamma = Mat::from_rows(f2, 1, &[vec![1], vec![1]])?;
    let e = TwoExt::new(triv.clone(), reg.clone(), reg, triv.clone(), alpha, beta, gamma)?;
    let c = class_of(&e)?;
    println!("Ext² group {}; class {:?}, zero: {}", c.group.describe(), c.value, c.is_zero());

    let split = class_of(&TwoExt::split(&triv, &triv))?;
    println!("split extension is zero: {}", split.is_zero());

    // Pulling back along 0: F_2 → F_2 kills the class.
    let zero = Mat::zeros(f2, 1, 1);
    println!("pullback along 0 is zero: {}", class_of(&pullback(&e, &zero, &triv)?)?.is_zero());

    // A random triangle A → B → C of Z/3-complexes over Z/9.
    let mut r = corpus::rng(7);
    let k = Coef::new(3, 2)?;
    let t = corpus::random_triangle(&FinGroup::cyclic(3), k, &mut r)?;
    let s = t.random_splitting(11)?;
    let rep = theorem31_pipeline(&t, &s)?;
    for st in &rep.stages {
        println!("  stage {}: {:?}", st.name, st.ext.exactness());
    }
    for a in &rep.arrows {
        println!("  {}: squares {:?}, equivariant {}", a.arrow, a.squares, a.equivariant);
    }
    println!("C₂ exact: {}; identity: {:?}", rep.c2_exact(), rep.identity_holds());
    Ok(())
}
