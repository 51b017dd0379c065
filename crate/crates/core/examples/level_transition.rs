//! Running a computation over Z/l^{m+1} and over Z/l^m and checking that the
//! reduction map commutes with every step.

use cellcoh::cellular::skeleton_filtration;
use cellcoh::equivariant::{FinGroup, GModule};
use cellcoh::linalg::Coef;
use cellcoh::space::{FinSpace, WCSheaf};
use cellcoh::transition::{level_transition_check, TransitionInput};

fn main() -> cellcoh::Result<()> {
    let z9 = Coef::new(3, 2)?;
    let (s, _) = FinSpace::face_poset_with_faces(&[vec![0, 1], vec![1, 2], vec![0, 2], vec![2, 3]])?;
    let inputs = [
        TransitionInput::Cellular { sheaf: WCSheaf::constant(&s, z9), filt: skeleton_filtration(&s)? },
        TransitionInput::GroupCohomology { module: GModule::regular(&FinGroup::cyclic(3), z9), p_max: 3 },
    ];
    for input in &inputs {
        let rep = level_transition_check(input)?;
        println!("{} down to level {}: {} checks, passed {}", rep.pipeline, rep.m, rep.checks.len(), rep.passed());
        for c in rep.checks.iter().take(4) {
            println!("  {} (degree {}): {}", c.name, c.degree, c.detail);
        }
    }
    Ok(())
}
