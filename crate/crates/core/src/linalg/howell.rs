use super::{vecops, Coef, Mat};

/// A row of a Howell form together with its pivot column and pivot exponent.
#[derive(Clone, Debug)]
struct Pivot {
    col: usize,
    exp: u32,
}

/// Reduces `rows` in place to Howell form and returns the pivots.
///
/// Over the chain ring `Z/p^m` the minimal-valuation entry of a column divides
/// every other entry, so elimination never needs gcd steps. A pivot `p^v` with
/// `v > 0` spawns the extra row `p^{m-v}·row`, which has a zero in the pivot
/// column; this is what gives the Howell property.
fn reduce_rows(coef: Coef, rows: &mut Vec<Vec<u64>>, cols: usize) -> Vec<Pivot> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows.len() {
            break;
        }
        let best = (r..rows.len())
            .filter(|&i| rows[i][c] != 0)
            .min_by_key(|&i| coef.valuation(rows[i][c]));
        let Some(best) = best else { continue };
        rows.swap(r, best);
        let v = coef.valuation(rows[r][c]);
        let pv = coef.power(v);
        let unit = rows[r][c] / pv;
        let inv = coef.inverse(unit).expect("unit part is invertible");
        for x in rows[r].iter_mut() {
            *x = coef.mul(*x, inv);
        }
        debug_assert_eq!(rows[r][c], pv);
        let pivot_row = rows[r].clone();
        for i in r + 1..rows.len() {
            let b = rows[i][c];
            if b != 0 {
                vecops::sub_scaled(coef, &mut rows[i], b / pv, &pivot_row);
            }
        }
        for i in 0..r {
            let b = rows[i][c];
            if b >= pv {
                vecops::sub_scaled(coef, &mut rows[i], b / pv, &pivot_row);
            }
        }
        if v > 0 {
            let s = coef.power(coef.m() - v);
            let extra: Vec<u64> = pivot_row.iter().map(|&x| coef.mul(x, s)).collect();
            if !vecops::is_zero(&extra) {
                rows.push(extra);
            }
        }
        pivots.push(Pivot { col: c, exp: v });
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Howell normal form: the unique canonical generating set of the row span.
pub fn howell_form(a: &Mat) -> Mat {
    let coef = a.coef();
    let mut rows = a.to_rows();
    rows.retain(|r| !vecops::is_zero(r));
    reduce_rows(coef, &mut rows, a.cols());
    Mat::from_residue_rows(coef, a.cols(), rows)
}

/// Reduces `v` modulo the span of a Howell-form matrix. The result is zero
/// exactly when `v` lies in the span, and it is a canonical coset representative.
pub fn howell_reduce(h: &Mat, v: &[u64]) -> Vec<u64> {
    let coef = h.coef();
    let mut v = v.to_vec();
    for row in h.row_iter() {
        let Some(col) = row.iter().position(|&x| x != 0) else { continue };
        let pv = row[col];
        if v[col] >= pv {
            let q = v[col] / pv;
            vecops::sub_scaled(coef, &mut v, q, row);
        }
    }
    v
}

/// `log_l` of the cardinality of the row span of `a`.
pub fn span_order_exp(a: &Mat) -> u64 {
    let coef = a.coef();
    let h = howell_form(a);
    h.row_iter()
        .map(|row| {
            let pv = row.iter().find(|&&x| x != 0).copied().unwrap_or(0);
            u64::from(coef.m() - coef.valuation(pv))
        })
        .sum()
}

/// Left kernel `{x : x·A = 0}`, returned in Howell form.
pub fn kernel(a: &Mat) -> Mat {
    let coef = a.coef();
    let (r, c) = (a.rows(), a.cols());
    let aug = Mat::hstack(coef, r, &[a, &Mat::identity(coef, r)]);
    let mut rows = aug.to_rows();
    reduce_rows(coef, &mut rows, c + r);
    let ker: Vec<Vec<u64>> = rows
        .into_iter()
        .filter(|row| vecops::is_zero(&row[..c]))
        .map(|row| row[c..].to_vec())
        .collect();
    howell_form(&Mat::from_residue_rows(coef, r, ker))
}

/// Precomputed transform for solving `x·A = b` repeatedly against the same `A`.
#[derive(Clone, Debug)]
pub struct Solver {
    coef: Coef,
    rows: usize,
    cols: usize,
    /// Howell rows of `[A | I]` whose pivot lies in the `A` part: `(col, pivot, h, t)` with `t·A = h`.
    steps: Vec<(usize, u64, Vec<u64>, Vec<u64>)>,
}

impl Solver {
    pub fn new(a: &Mat) -> Self {
        let coef = a.coef();
        let (r, c) = (a.rows(), a.cols());
        let aug = Mat::hstack(coef, r, &[a, &Mat::identity(coef, r)]);
        let mut rows = aug.to_rows();
        let pivots = reduce_rows(coef, &mut rows, c + r);
        let steps = pivots
            .iter()
            .zip(rows)
            .filter(|(p, _)| p.col < c)
            .map(|(p, row)| (p.col, coef.power(p.exp), row[..c].to_vec(), row[c..].to_vec()))
            .collect();
        Solver {
            coef,
            rows: r,
            cols: c,
            steps,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Some `x` with `x·A = b`, or `None` when `b` is outside the row span.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.cols, "right-hand side has the wrong length");
        let coef = self.coef;
        let mut rem: Vec<u64> = b.iter().map(|&x| x % coef.modulus()).collect();
        let mut x = vec![0u64; self.rows];
        for (col, pv, h, t) in &self.steps {
            let e = rem[*col];
            if e == 0 {
                continue;
            }
            if !e.is_multiple_of(*pv) {
                return None;
            }
            let q = e / pv;
            vecops::sub_scaled(coef, &mut rem, q, h);
            vecops::axpy(coef, &mut x, q, t);
        }
        vecops::is_zero(&rem).then_some(x)
    }

    pub fn contains(&self, b: &[u64]) -> bool {
        self.solve(b).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn span(a: &Mat) -> BTreeSet<Vec<u64>> {
        let coef = a.coef();
        let n = coef.modulus();
        let mut out = BTreeSet::new();
        let total = (n as usize).pow(a.rows() as u32);
        for idx in 0..total {
            let mut x = Vec::with_capacity(a.rows());
            let mut k = idx;
            for _ in 0..a.rows() {
                x.push((k % n as usize) as u64);
                k /= n as usize;
            }
            out.insert(a.apply(&x));
        }
        out
    }

    fn z(l: u64, m: u32) -> Coef {
        Coef::new(l, m).unwrap()
    }

    #[test]
    fn identity_is_already_canonical() {
        let c = z(2, 2);
        assert_eq!(howell_form(&Mat::identity(c, 2)), Mat::identity(c, 2));
    }

    #[test]
    fn single_two_over_z4() {
        let c = z(2, 2);
        let a = Mat::from_rows(c, 1, &[vec![2]]).unwrap();
        assert_eq!(howell_form(&a), a);
    }

    #[test]
    fn dependent_rows_collapse() {
        let c = z(2, 2);
        let a = Mat::from_rows(c, 2, &[vec![1, 2], vec![2, 0]]).unwrap();
        let h = howell_form(&a);
        // [2,0] = 2·[1,2] over Z/4, so both spans are the 4 multiples of (1,2).
        assert_eq!(span(&a), span(&h));
        assert_eq!(h, Mat::from_rows(c, 2, &[vec![1, 2]]).unwrap());
    }

    #[test]
    fn howell_property_row_is_added() {
        let c = z(2, 2);
        let a = Mat::from_rows(c, 2, &[vec![2, 1]]).unwrap();
        let h = howell_form(&a);
        // 2·(2,1) = (0,2) must appear as its own row.
        assert_eq!(h, Mat::from_rows(c, 2, &[vec![2, 1], vec![0, 2]]).unwrap());
    }

    #[test]
    fn kernel_examples() {
        let c = z(2, 2);
        assert_eq!(kernel(&Mat::identity(c, 2)).rows(), 0);
        let a = Mat::from_rows(c, 1, &[vec![2]]).unwrap();
        assert_eq!(kernel(&a), Mat::from_rows(c, 1, &[vec![2]]).unwrap());
        let c9 = z(3, 2);
        let zero = Mat::from_rows(c9, 1, &[vec![0]]).unwrap();
        assert_eq!(kernel(&zero), Mat::identity(c9, 1));
    }

    #[test]
    fn solve_examples() {
        let c = z(2, 2);
        let a = Mat::from_rows(c, 1, &[vec![2]]).unwrap();
        let s = Solver::new(&a);
        let x = s.solve(&[2]).unwrap();
        assert_eq!(a.apply(&x), vec![2]);
        assert!(s.solve(&[1]).is_none());
        let id = Solver::new(&Mat::identity(c, 3));
        assert_eq!(id.solve(&[3, 1, 2]), Some(vec![3, 1, 2]));
    }

    #[test]
    fn span_order_matches_enumeration() {
        let c = z(2, 2);
        let a = Mat::from_rows(c, 2, &[vec![2, 1], vec![0, 2]]).unwrap();
        assert_eq!(1u64 << span_order_exp(&a), span(&a).len() as u64);
    }
}
