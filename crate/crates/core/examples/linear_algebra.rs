//! Modules over Z/l^m: Howell forms, kernels, solving and invariant factors.

use cellcoh::linalg::{howell_form, kernel, Coef, FinMod, Mat, Solver, Subquotient};

fn main() -> cellcoh::Result<()> {
    let r = Coef::new(2, 3)?;
    let a = Mat::from_rows(r, 3, &[vec![2, 4, 6], vec![4, 0, 4], vec![1, 1, 1]])?;
    println!("A over {r}:\n{a:?}");
    println!("Howell form:\n{:?}", howell_form(&a));
    println!("left kernel:\n{:?}", kernel(&a));

    let s = Solver::new(&a);
    let b = a.apply(&[3, 1, 5]);
    let x = s.solve(&b).expect("b lies in the row span");
    assert_eq!(a.apply(&x), b);
    println!("x·A = {b:?} solved by x = {x:?}");
    println!("(1, 0, 0) in the row span: {}", s.contains(&[1, 0, 0]));

    // (Z/8)^3 modulo the rows of A.
    let m = FinMod::new(r, 3, &a)?;
    println!("coker A = {}", m.describe());

    // A subquotient: the span of (1,1,1) modulo the span of (4,4,4).
    let free = FinMod::free(r, 3);
    let sub = Mat::from_rows(r, 3, &[vec![1, 1, 1]])?;
    let kill = Mat::from_rows(r, 3, &[vec![4, 4, 4]])?;
    let sq = Subquotient::new(&free, &sub, &kill)?;
    println!("<(1,1,1)> / <(4,4,4)> = {}", sq.module().describe());
    Ok(())
}
