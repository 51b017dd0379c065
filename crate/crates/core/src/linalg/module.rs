use std::fmt;

use super::howell::{howell_form, howell_reduce, kernel, span_order_exp, Solver};
use super::{vecops, Coef, Mat};
use crate::error::{Error, Result};

/// A finitely generated `Z/l^m`-module `(Z/l^m)^rank / rowspan(relations)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinMod {
    coef: Coef,
    rank: usize,
    relations: Mat,
}

impl fmt::Debug for FinMod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinMod({}; {})", self.coef, self.describe())
    }
}

impl FinMod {
    pub fn new(coef: Coef, rank: usize, relations: &Mat) -> Result<Self> {
        if relations.cols() != rank {
            return Err(Error::DimensionMismatch(format!(
                "relations have {} columns, ambient rank is {rank}",
                relations.cols()
            )));
        }
        Ok(FinMod {
            coef,
            rank,
            relations: howell_form(relations),
        })
    }

    pub fn free(coef: Coef, rank: usize) -> Self {
        FinMod {
            coef,
            rank,
            relations: Mat::zeros(coef, 0, rank),
        }
    }

    pub fn zero(coef: Coef) -> Self {
        Self::free(coef, 0)
    }

    /// `Z/l^e` on one generator.
    pub fn cyclic(coef: Coef, e: u32) -> Self {
        assert!(e <= coef.m());
        if e == coef.m() {
            return Self::free(coef, 1);
        }
        let rel = Mat::from_residue_rows(coef, 1, vec![vec![coef.power(e)]]);
        FinMod {
            coef,
            rank: 1,
            relations: rel,
        }
    }

    /// Direct sum of cyclic modules `Z/l^{e_i}`.
    pub fn from_exponents(coef: Coef, exps: &[u32]) -> Self {
        Self::direct_sum(coef, &exps.iter().map(|&e| Self::cyclic(coef, e)).collect::<Vec<_>>())
    }

    pub fn direct_sum(coef: Coef, parts: &[FinMod]) -> Self {
        let rank = parts.iter().map(|p| p.rank).sum();
        let blocks: Vec<&Mat> = parts.iter().map(|p| &p.relations).collect();
        let rel = if blocks.is_empty() {
            Mat::zeros(coef, 0, 0)
        } else {
            Mat::block_diag(coef, &blocks)
        };
        FinMod {
            coef,
            rank,
            relations: howell_form(&rel),
        }
    }

    pub fn coef(&self) -> Coef {
        self.coef
    }

    /// Number of ambient generators.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &Mat {
        &self.relations
    }

    /// `log_l |M|`.
    pub fn order_exp(&self) -> u64 {
        self.rank as u64 * u64::from(self.coef.m()) - span_order_exp(&self.relations)
    }

    pub fn is_zero(&self) -> bool {
        self.order_exp() == 0
    }

    /// Canonical coset representative of an ambient vector.
    pub fn normalize(&self, v: &[u64]) -> Vec<u64> {
        howell_reduce(&self.relations, v)
    }

    pub fn is_zero_elem(&self, v: &[u64]) -> bool {
        vecops::is_zero(&self.normalize(v))
    }

    /// Exponents `e_i` with `M ≅ ⊕ Z/l^{e_i}`, ascending, trivial summands dropped.
    pub fn invariant_factors(&self) -> Vec<u32> {
        let sb = smith_basis(&self.relations, self.rank);
        let mut e: Vec<u32> = sb.vals.iter().copied().filter(|&v| v > 0).collect();
        e.sort_unstable();
        e
    }

    /// True when the module is free over `Z/l^m`.
    pub fn is_free(&self) -> bool {
        self.invariant_factors().iter().all(|&e| e == self.coef.m())
    }

    pub fn is_isomorphic(&self, other: &FinMod) -> bool {
        self.coef == other.coef && self.invariant_factors() == other.invariant_factors()
    }

    /// `M ⊗ Z/l^{m'}` presented on the same generators.
    pub fn reduce_to(&self, coef: Coef) -> FinMod {
        FinMod {
            coef,
            rank: self.rank,
            relations: howell_form(&self.relations.reduce_to(coef)),
        }
    }

    /// Human-readable form such as `Z/2 + Z/4`.
    pub fn describe(&self) -> String {
        let e = self.invariant_factors();
        if e.is_empty() {
            return "0".into();
        }
        e.iter()
            .map(|&k| format!("Z/{}", self.coef.l().pow(k)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// All elements, as canonical representatives. Only for small modules.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let n = self.coef.modulus();
        let mut out = std::collections::BTreeSet::new();
        let total = (n as u128).pow(self.rank as u32);
        assert!(total <= 1 << 22, "module too large to enumerate");
        for idx in 0..total as u64 {
            let mut v = Vec::with_capacity(self.rank);
            let mut k = idx;
            for _ in 0..self.rank {
                v.push(k % n);
                k /= n;
            }
            out.insert(self.normalize(&v));
        }
        out.into_iter().collect()
    }
}

/// Smith data of a relation matrix: column transform `q` and its inverse,
/// with diagonal valuations per column (`m` for zero diagonal entries).
struct SmithBasis {
    vals: Vec<u32>,
    q: Mat,
    qinv: Mat,
}

fn smith_basis(rel: &Mat, n: usize) -> SmithBasis {
    let coef = rel.coef();
    let mut a = rel.clone();
    let mut q = Mat::identity(coef, n);
    let mut qinv = Mat::identity(coef, n);
    let mut vals = vec![coef.m(); n];
    let k = a.rows();
    let mut t = 0;
    while t < k.min(n) {
        let mut best: Option<(usize, usize, u32)> = None;
        for i in t..k {
            for j in t..n {
                let x = a.get(i, j);
                if x != 0 {
                    let v = coef.valuation(x);
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((bi, bj, v)) = best else { break };
        swap_rows(&mut a, t, bi);
        swap_cols(&mut a, t, bj);
        swap_cols(&mut q, t, bj);
        swap_rows(&mut qinv, t, bj);
        let pv = coef.power(v);
        let unit = a.get(t, t) / pv;
        let inv = coef.inverse(unit).expect("unit");
        // Scale column t by inv: Q ← Q·diag, Qinv ← diag^{-1}·Qinv.
        for i in 0..k {
            let x = a.get(i, t);
            a.set(i, t, coef.mul(x, inv));
        }
        for i in 0..n {
            let x = q.get(i, t);
            q.set(i, t, coef.mul(x, inv));
        }
        for j in 0..n {
            let x = qinv.get(t, j);
            qinv.set(t, j, coef.mul(x, unit));
        }
        for i in 0..k {
            if i != t {
                let f = a.get(i, t) / pv;
                if f != 0 {
                    let pr = a.row(t).to_vec();
                    vecops::sub_scaled(coef, a.row_mut(i), f, &pr);
                }
            }
        }
        for j in t + 1..n {
            let f = a.get(t, j) / pv;
            if f != 0 {
                // column j -= f·column t
                for i in 0..k {
                    let x = coef.sub(a.get(i, j), coef.mul(f, a.get(i, t)));
                    a.set(i, j, x);
                }
                for i in 0..n {
                    let x = coef.sub(q.get(i, j), coef.mul(f, q.get(i, t)));
                    q.set(i, j, x);
                }
                // inverse op: row t of qinv += f·row j
                let rj = qinv.row(j).to_vec();
                vecops::axpy(coef, qinv.row_mut(t), f, &rj);
            }
        }
        vals[t] = v;
        t += 1;
    }
    SmithBasis { vals, q, qinv }
}

fn swap_rows(a: &mut Mat, i: usize, j: usize) {
    if i == j {
        return;
    }
    let ri = a.row(i).to_vec();
    let rj = a.row(j).to_vec();
    a.row_mut(i).copy_from_slice(&rj);
    a.row_mut(j).copy_from_slice(&ri);
}

fn swap_cols(a: &mut Mat, i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in 0..a.rows() {
        let x = a.get(r, i);
        let y = a.get(r, j);
        a.set(r, i, y);
        a.set(r, j, x);
    }
}

/// A homomorphism of presented modules, given on ambient generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMap {
    source: FinMod,
    target: FinMod,
    matrix: Mat,
}

impl ModMap {
    /// Checks that relations of the source land in the relations of the target.
    pub fn new(source: FinMod, target: FinMod, matrix: Mat) -> Result<Self> {
        if matrix.rows() != source.rank() || matrix.cols() != target.rank() {
            return Err(Error::DimensionMismatch(format!(
                "map matrix is {}x{}, modules have ranks {} and {}",
                matrix.rows(),
                matrix.cols(),
                source.rank(),
                target.rank()
            )));
        }
        for rel in source.relations().row_iter() {
            if !target.is_zero_elem(&matrix.apply(rel)) {
                return Err(Error::NotWellDefined(
                    "a relation of the source does not map to zero".into(),
                ));
            }
        }
        Ok(ModMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(m: &FinMod) -> Self {
        ModMap {
            source: m.clone(),
            target: m.clone(),
            matrix: Mat::identity(m.coef(), m.rank()),
        }
    }

    pub fn zero(source: &FinMod, target: &FinMod) -> Self {
        ModMap {
            source: source.clone(),
            target: target.clone(),
            matrix: Mat::zeros(source.coef(), source.rank(), target.rank()),
        }
    }

    pub fn source(&self) -> &FinMod {
        &self.source
    }

    pub fn target(&self) -> &FinMod {
        &self.target
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.target.normalize(&self.matrix.apply(v))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModMap) -> Result<ModMap> {
        if self.target != other.source {
            return Err(Error::DimensionMismatch("composing maps with mismatched modules".into()));
        }
        Ok(ModMap {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: self.matrix.mul(&other.matrix),
        })
    }

    pub fn add(&self, other: &ModMap) -> ModMap {
        ModMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn scale(&self, s: i64) -> ModMap {
        ModMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.scale(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        (0..self.source.rank()).all(|i| self.target.is_zero_elem(self.matrix.row(i)))
    }

    /// Equality as homomorphisms (not as matrices).
    pub fn equals(&self, other: &ModMap) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.add(&other.scale(-1)).is_zero()
    }

    pub fn image_order_exp(&self) -> u64 {
        let c = self.source.coef();
        let stacked = Mat::vstack(c, self.target.rank(), &[&self.matrix, self.target.relations()]);
        span_order_exp(&stacked) - span_order_exp(self.target.relations())
    }

    pub fn kernel_order_exp(&self) -> u64 {
        self.source.order_exp() - self.image_order_exp()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_order_exp() == 0
    }

    pub fn is_surjective(&self) -> bool {
        self.image_order_exp() == self.target.order_exp()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Generators of the kernel, as ambient vectors of the source.
    pub fn kernel_gens(&self) -> Mat {
        let c = self.source.coef();
        let stacked = Mat::vstack(c, self.target.rank(), &[&self.matrix, self.target.relations()]);
        let k = kernel(&stacked);
        k.select_cols(&(0..self.source.rank()).collect::<Vec<_>>())
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<ModMap> {
        if !self.is_iso() {
            return Err(Error::NotIsomorphism);
        }
        let c = self.source.coef();
        let stacked = Mat::vstack(c, self.target.rank(), &[&self.matrix, self.target.relations()]);
        let solver = Solver::new(&stacked);
        let mut rows = Vec::with_capacity(self.target.rank());
        for j in 0..self.target.rank() {
            let mut e = vec![0u64; self.target.rank()];
            e[j] = 1 % c.modulus();
            let x = solver.solve(&e).expect("surjective map has preimages");
            rows.push(self.source.normalize(&x[..self.source.rank()]));
        }
        ModMap::new(
            self.target.clone(),
            self.source.clone(),
            Mat::from_residue_rows(c, self.source.rank(), rows),
        )
    }
}

/// `(span sub + R) / (span kill + R)` inside an ambient module, with a canonical
/// presentation `⊕ Z/l^{e_i}` (ascending `e_i`, each `≥ 1`) and the maps
/// relating it to ambient vectors.
#[derive(Clone, Debug)]
pub struct Subquotient {
    module: FinMod,
    ambient: FinMod,
    gens: Mat,
    proj: Mat,
    section: Mat,
    solver: Solver,
}

impl Subquotient {
    pub fn new(ambient: &FinMod, sub_gens: &Mat, kill_gens: &Mat) -> Result<Self> {
        let coef = ambient.coef();
        let n = ambient.rank();
        if sub_gens.cols() != n || kill_gens.cols() != n {
            return Err(Error::DimensionMismatch("generator width differs from ambient rank".into()));
        }
        let gens = howell_form(sub_gens);
        let k = gens.rows();
        let sub_stack = Mat::vstack(coef, n, &[&gens, ambient.relations()]);
        let solver = Solver::new(&sub_stack);
        for row in kill_gens.row_iter() {
            if !solver.contains(row) {
                return Err(Error::NotContained);
            }
        }
        let stacked = Mat::vstack(coef, n, &[&gens, kill_gens, ambient.relations()]);
        let rel = kernel(&stacked).select_cols(&(0..k).collect::<Vec<_>>());
        let sb = smith_basis(&howell_form(&rel), k);
        let mut kept: Vec<usize> = (0..k).filter(|&t| sb.vals[t] > 0).collect();
        kept.sort_by_key(|&t| (sb.vals[t], t));
        let exps: Vec<u32> = kept.iter().map(|&t| sb.vals[t]).collect();
        let module = FinMod::from_exponents(coef, &exps);
        let proj = sb.q.select_cols(&kept);
        let section = sb.qinv.select_rows(&kept);
        Ok(Subquotient {
            module,
            ambient: ambient.clone(),
            gens,
            proj,
            section,
            solver,
        })
    }

    /// The whole ambient module, canonically presented.
    pub fn canonical(ambient: &FinMod) -> Self {
        let c = ambient.coef();
        Self::new(ambient, &Mat::identity(c, ambient.rank()), &Mat::zeros(c, 0, ambient.rank()))
            .expect("identity generators contain the empty kill set")
    }

    /// The submodule generated by `gens`.
    pub fn submodule(ambient: &FinMod, gens: &Mat) -> Result<Self> {
        Self::new(ambient, gens, &Mat::zeros(ambient.coef(), 0, ambient.rank()))
    }

    /// The quotient by the submodule generated by `kill`.
    pub fn quotient(ambient: &FinMod, kill: &Mat) -> Result<Self> {
        Self::new(ambient, &Mat::identity(ambient.coef(), ambient.rank()), kill)
    }

    pub fn module(&self) -> &FinMod {
        &self.module
    }

    pub fn ambient(&self) -> &FinMod {
        &self.ambient
    }

    /// Generators of the `sub` part (Howell form), as ambient vectors.
    pub fn sub_gens(&self) -> &Mat {
        &self.gens
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.solver.contains(v)
    }

    /// Image of an ambient vector of the `sub` part in the canonical module.
    pub fn reduce(&self, v: &[u64]) -> Result<Vec<u64>> {
        let y = self.solver.solve(v).ok_or(Error::NotContained)?;
        let k = self.gens.rows();
        Ok(self.module.normalize(&self.proj.apply(&y[..k])))
    }

    /// An ambient representative of a canonical element.
    pub fn lift(&self, u: &[u64]) -> Vec<u64> {
        let y = self.section.apply(u);
        self.ambient.normalize(&self.gens.apply(&y))
    }

    /// Matrix whose rows are ambient lifts of the canonical generators.
    pub fn lift_matrix(&self) -> Mat {
        let c = self.module.coef();
        let r = self.module.rank();
        let rows = (0..r)
            .map(|i| {
                let mut e = vec![0u64; r];
                e[i] = 1 % c.modulus();
                self.lift(&e)
            })
            .collect();
        Mat::from_residue_rows(c, self.ambient.rank(), rows)
    }

    /// Map from the canonical module onto the `sub` part of the ambient... as a
    /// `ModMap` when `kill` is zero (the inclusion of a submodule).
    pub fn inclusion(&self) -> Result<ModMap> {
        ModMap::new(self.module.clone(), self.ambient.clone(), self.lift_matrix())
    }

    /// The projection `ambient → quotient` when the `sub` part is everything.
    pub fn projection(&self) -> Result<ModMap> {
        let c = self.module.coef();
        let n = self.ambient.rank();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![0u64; n];
            e[i] = 1 % c.modulus();
            rows.push(self.reduce(&e)?);
        }
        ModMap::new(
            self.ambient.clone(),
            self.module.clone(),
            Mat::from_residue_rows(c, self.module.rank(), rows),
        )
    }

    /// Map between subquotients induced by an ambient matrix `f`. The target may
    /// live at a lower level of the same prime; `f` is then read mod the lower modulus.
    pub fn induced(&self, to: &Subquotient, f: &Mat) -> Result<ModMap> {
        let tc = to.module.coef();
        let r = self.module.rank();
        let mut rows = Vec::with_capacity(r);
        let f = if f.coef() == tc { f.clone() } else { f.reduce_to(tc) };
        for i in 0..r {
            let mut e = vec![0u64; r];
            e[i] = 1 % self.module.coef().modulus();
            let v: Vec<u64> = self.lift(&e).iter().map(|&x| x % tc.modulus()).collect();
            let w = f.apply(&v);
            rows.push(to.reduce(&w).map_err(|_| {
                Error::NotWellDefined("induced map leaves the target subquotient".into())
            })?);
        }
        let source = if tc == self.module.coef() {
            self.module.clone()
        } else {
            self.module.reduce_to(tc)
        };
        ModMap::new(source, to.module.clone(), Mat::from_residue_rows(tc, to.module.rank(), rows))
    }
}
