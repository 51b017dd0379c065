//! Sheaf cohomology of finite spaces: the pseudo-circle, a relative group and
//! extension by zero.

use cellcoh::linalg::Coef;
use cellcoh::space::{extend_by_zero, relative_cohomology, sheaf_cohomology, FinSpace, SubspacePair, WCSheaf};

fn show(name: &str, f: &WCSheaf, top: i64) {
    let groups: Vec<String> = (0..=top).map(|q| sheaf_cohomology(f, q).describe()).collect();
    println!("{name}: {}", groups.join(", "));
}

fn main() -> cellcoh::Result<()> {
    let z4 = Coef::new(2, 2)?;
    let s1 = FinSpace::pseudo_circle();
    let f = WCSheaf::constant(&s1, z4);
    show("H^*(S, Z/4)", &f, 2);

    // The boundary of a triangle, as the face poset of its edges.
    let tri = FinSpace::face_poset(&[vec![0, 1], vec![1, 2], vec![0, 2]])?;
    show("H^*(boundary triangle, Z/4)", &WCSheaf::constant(&tri, z4), 2);

    // Relative to the two closed points.
    let y = s1.set(&["p", "q"]);
    for q in 0..=1 {
        println!("H^{q}(S, {{p, q}}) = {}", relative_cohomology(&f, s1.all(), y, q)?.describe());
    }

    // j_! of the constant sheaf on the open complement {x, y}.
    let pair = SubspacePair::new(&s1, y)?;
    let g = extend_by_zero(&pair, &f.restrict(pair.open_part()))?;
    show("H^*(S, j_! Z/4)", &g, 2);
    Ok(())
}
