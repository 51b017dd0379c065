//! The classes cl⁰, cl¹, cl² of a cocycle of the Hochschild–Serre total
//! complex, and how cl² moves with the choice of splitting.

use cellcoh::equivariant::{cl_classes, ClContext, FinGroup, GComplex, GModule, Twist};
use cellcoh::linalg::{Coef, FinMod, Mat};
use cellcoh::yoneda::jannsen_consistency;

fn main() -> cellcoh::Result<()> {
    // B = Z/4 with the sign action of Z/2, in degree 0.
    let z4 = Coef::new(2, 2)?;
    let g = FinGroup::cyclic(2);
    let sign = GModule::trivial(&g, FinMod::free(z4, 1)).twist(&Twist::new(&g, z4, vec![1, 3], 1)?);
    let b = GComplex::from_modules(&g, 0, &[sign], vec![])?;
    let ctx = ClContext::new(&b, 2)?;
    println!("Tot² has rank {}", ctx.tot.rank(2));
    for z in ctx.tot.diff_map(2).kernel_gens().row_iter() {
        let rep = cl_classes(&ctx, z)?;
        let vals: Vec<String> = rep
            .classes
            .iter()
            .map(|c| format!("cl{} = {:?} in {}", c.j, c.value, c.target.describe()))
            .collect();
        println!("z = {z:?}: {}", vals.join("; "));
    }

    // [F_3[G] →(1−g) F_3[G]] for G = Z/3: here d₂ is nonzero.
    let f3 = Coef::new(3, 1)?;
    let c3 = FinGroup::cyclic(3);
    let reg = GModule::regular(&c3, f3);
    let d = Mat::from_rows(f3, 3, &[vec![1, -1, 0], vec![0, 1, -1], vec![-1, 0, 1]])?;
    let b = GComplex::from_modules(&c3, 0, &[reg.clone(), reg], vec![d])?;
    let rank = ClContext::new(&b, 2)?.tot.rank(2);
    let rep = jannsen_consistency(&b, 0, &vec![0; rank])?;
    for c in &rep.checks {
        println!("splitting {:?}: d2 = {:?}, pullback of χ = {:?}, d2 = -[c*χ]: {}", c.splitting, c.d2, c.pullback, c.holds);
    }
    Ok(())
}
