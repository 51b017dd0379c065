//! The Čech double complex of cellular complexes for an open cover, compared
//! with the cohomology of the whole space.

use cellcoh::cech::{build_compatible, cech_double, verify_theorem22, Cover};
use cellcoh::complex::total;
use cellcoh::linalg::Coef;
use cellcoh::space::{FinSpace, WCSheaf};

fn main() -> cellcoh::Result<()> {
    let r = Coef::new(2, 2)?;
    let s = FinSpace::pseudo_circle();
    let f = WCSheaf::constant(&s, r);
    let cover = Cover::new(&s, vec![s.set(&["p", "x", "y"]), s.set(&["q", "x", "y"])])?;

    let filts = build_compatible(&f, &cover)?;
    filts.check_containment(&s)?;
    let c = cech_double(&f, &cover, &filts)?;
    println!("double complex shape: {:?}", c.double.shape());
    for (subset, cell) in &c.cells {
        println!("  D_{subset:?}: {:?}", cell.d.cohomology_profile());
    }
    println!("total: {:?}", total(&c.double).cohomology_profile());

    let rep = verify_theorem22(&f, &cover, &filts)?;
    println!("global: {:?}", rep.global);
    println!("agrees with the total complex: {}", rep.holds());
    Ok(())
}
