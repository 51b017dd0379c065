//! Cellular filtrations: validation, the cellular complex, the chain of
//! quasi-isomorphisms behind it, and the filtration search.

use cellcoh::cellular::{cellular_complex, reduce_with_witness, search_filtration, skeleton_filtration, validate_filtration, Filtration};
use cellcoh::linalg::Coef;
use cellcoh::space::{FinSpace, WCSheaf};

fn main() -> cellcoh::Result<()> {
    let r = Coef::new(3, 1)?;
    let s = FinSpace::pseudo_circle();
    let f = WCSheaf::constant(&s, r);

    let filt = Filtration::new(&s, vec![s.set(&["p", "q"]), s.all()])?;
    let rep = validate_filtration(&f, &filt)?;
    println!("X_0 = {{p, q}} valid: {}", rep.valid);
    for lv in &rep.levels {
        println!("  level {}: {:?} concentrated: {}", lv.level, lv.cohomology, lv.concentrated);
    }

    let cell = cellular_complex(&f, &filt)?;
    println!("cellular complex: {:?}", cell.d);
    println!("its cohomology: {:?}", cell.d.cohomology_profile());

    let w = reduce_with_witness(&f, &filt)?;
    for step in &w.steps {
        println!("  {}: quasi-iso {}", step.name, step.quasi_iso.holds());
    }
    println!("every step a quasi-isomorphism: {}", w.all_quasi_iso());

    // A 2-dimensional example: the face poset of a filled square.
    let (sq, _) = FinSpace::face_poset_with_faces(&[vec![0, 1, 2], vec![0, 2, 3]])?;
    let g = WCSheaf::constant(&sq, r);
    println!("skeleton filtration: {:?}", skeleton_filtration(&sq)?.describe(&sq));
    let found = search_filtration(&g, sq.closure(sq.set(&["0"])))?;
    println!("search from a vertex: {:?}", found.describe(&sq));
    Ok(())
}
