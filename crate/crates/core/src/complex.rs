//! Bounded cochain complexes of presented modules, chain maps, cones, shifts,
//! totalization of double complexes, and the long exact sequence of a termwise
//! short exact sequence.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Coef, FinMod, Mat, ModMap, Solver, Subquotient};

/// A cochain complex `C^lo → … → C^hi`, zero outside its range.
#[derive(Clone, PartialEq, Eq)]
pub struct Complex {
    coef: Coef,
    lo: i64,
    modules: Vec<FinMod>,
    /// `diffs[k]` is `d: C^{lo+k} → C^{lo+k+1}`.
    diffs: Vec<Mat>,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Complex[{}..{}]", self.lo, self.hi())?;
        for (k, m) in self.modules.iter().enumerate() {
            write!(f, " {}:{}", self.lo + k as i64, m.rank())?;
        }
        Ok(())
    }
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl Complex {
    /// Validates well-definedness of each differential and `d∘d = 0`.
    pub fn new(coef: Coef, lo: i64, modules: Vec<FinMod>, diffs: Vec<Mat>) -> Result<Self> {
        let c = Self::new_unchecked(coef, lo, modules, diffs)?;
        c.check()?;
        Ok(c)
    }

    /// Shape checks only.
    pub(crate) fn new_unchecked(coef: Coef, lo: i64, modules: Vec<FinMod>, diffs: Vec<Mat>) -> Result<Self> {
        if diffs.len() != modules.len().saturating_sub(1) {
            return Err(Error::DimensionMismatch(format!(
                "{} modules need {} differentials, got {}",
                modules.len(),
                modules.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.rows() != modules[k].rank() || d.cols() != modules[k + 1].rank() {
                return Err(Error::DimensionMismatch(format!(
                    "differential in degree {} has shape {}x{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols()
                )));
            }
        }
        Ok(Complex {
            coef,
            lo,
            modules,
            diffs,
        })
    }

    fn check(&self) -> Result<()> {
        for k in self.lo..self.hi() {
            let d = self.diff(k);
            let tgt = self.module(k + 1);
            for rel in self.module(k).relations().row_iter() {
                if !tgt.is_zero_elem(&d.apply(rel)) {
                    return Err(Error::NotWellDefined(format!("differential in degree {k}")));
                }
            }
        }
        for k in self.lo..self.hi() - 1 {
            let dd = self.diff(k).mul(&self.diff(k + 1));
            let tgt = self.module(k + 2);
            if !dd.row_iter().all(|r| tgt.is_zero_elem(r)) {
                return Err(Error::NotAComplex(k));
            }
        }
        Ok(())
    }

    pub fn zero(coef: Coef) -> Self {
        Complex {
            coef,
            lo: 0,
            modules: vec![],
            diffs: vec![],
        }
    }

    /// A single module placed in degree `deg`.
    pub fn concentrated(m: FinMod, deg: i64) -> Self {
        Complex {
            coef: m.coef(),
            lo: deg,
            modules: vec![m],
            diffs: vec![],
        }
    }

    /// Two-term complex `M → N` in degrees `deg, deg+1`.
    pub fn two_term(f: &ModMap, deg: i64) -> Result<Self> {
        Complex::new(
            f.source().coef(),
            deg,
            vec![f.source().clone(), f.target().clone()],
            vec![f.matrix().clone()],
        )
    }

    pub fn coef(&self) -> Coef {
        self.coef
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest degree; `lo - 1` for the empty complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.modules.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    fn idx(&self, k: i64) -> Option<usize> {
        (k >= self.lo && k <= self.hi()).then(|| (k - self.lo) as usize)
    }

    pub fn module(&self, k: i64) -> FinMod {
        self.idx(k).map_or_else(|| FinMod::zero(self.coef), |i| self.modules[i].clone())
    }

    pub fn module_ref(&self, k: i64) -> Option<&FinMod> {
        self.idx(k).map(|i| &self.modules[i])
    }

    pub fn rank(&self, k: i64) -> usize {
        self.idx(k).map_or(0, |i| self.modules[i].rank())
    }

    /// `d^k: C^k → C^{k+1}` as a matrix (possibly with zero rows or columns).
    pub fn diff(&self, k: i64) -> Mat {
        match (self.idx(k), self.idx(k + 1)) {
            (Some(i), Some(_)) => self.diffs[i].clone(),
            _ => Mat::zeros(self.coef, self.rank(k), self.rank(k + 1)),
        }
    }

    pub fn diff_map(&self, k: i64) -> ModMap {
        ModMap::new(self.module(k), self.module(k + 1), self.diff(k)).expect("validated differential")
    }

    /// Cocycles modulo coboundaries in degree `k`, with reduce/lift maps.
    pub fn cohomology_sq(&self, k: i64) -> Subquotient {
        let m = self.module(k);
        let z = self.diff_map(k).kernel_gens();
        let b = self.diff(k - 1);
        Subquotient::new(&m, &z, &b).expect("coboundaries are cocycles")
    }

    pub fn cohomology(&self, k: i64) -> FinMod {
        self.cohomology_sq(k).module().clone()
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|k| self.cohomology(k).is_zero())
    }

    /// Invariant factors of `H^k` for every degree in range.
    pub fn cohomology_profile(&self) -> Vec<(i64, Vec<u32>)> {
        self.degrees().map(|k| (k, self.cohomology(k).invariant_factors())).collect()
    }

    /// `C[k]^i = C^{i+k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i64) -> Complex {
        Complex {
            coef: self.coef,
            lo: self.lo - k,
            modules: self.modules.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(sign(k))).collect(),
        }
    }

    /// Same complex viewed over a wider degree range (padding with zeros).
    pub fn padded(&self, lo: i64, hi: i64) -> Complex {
        let lo = lo.min(self.lo);
        let hi = hi.max(self.hi());
        let modules: Vec<FinMod> = (lo..=hi).map(|k| self.module(k)).collect();
        let diffs = (lo..hi).map(|k| self.diff(k)).collect();
        Complex {
            coef: self.coef,
            lo,
            modules,
            diffs,
        }
    }

    /// Entrywise reduction to a lower level: `C ⊗ Z/l^{m'}`.
    pub fn reduce_to(&self, coef: Coef) -> Complex {
        Complex {
            coef,
            lo: self.lo,
            modules: self.modules.iter().map(|m| m.reduce_to(coef)).collect(),
            diffs: self.diffs.iter().map(|d| d.reduce_to(coef)).collect(),
        }
    }

    /// The subcomplex generated in each degree by the given rows (which must be
    /// carried into each other by the differential), with its inclusion.
    pub fn subcomplex(&self, gens: &[(i64, Mat)]) -> Result<(Complex, ChainMap)> {
        let coef = self.coef;
        let lo = self.lo;
        let hi = self.hi();
        let mut mods = Vec::new();
        let mut incl = Vec::new();
        let mut gen_rows = Vec::new();
        for k in lo..=hi {
            let g = gens
                .iter()
                .find(|(d, _)| *d == k)
                .map(|(_, m)| m.clone())
                .unwrap_or_else(|| Mat::zeros(coef, 0, self.rank(k)));
            let amb = self.module(k);
            let stacked = Mat::vstack(coef, amb.rank(), &[&g, amb.relations()]);
            let rel = crate::linalg::kernel(&stacked).select_cols(&(0..g.rows()).collect::<Vec<_>>());
            mods.push(FinMod::new(coef, g.rows(), &rel)?);
            gen_rows.push(g.clone());
            incl.push(g);
        }
        let mut diffs = Vec::new();
        for k in lo..hi {
            let i = (k - lo) as usize;
            let next = &gen_rows[i + 1];
            let amb = self.module(k + 1);
            let solver = Solver::new(&Mat::vstack(coef, amb.rank(), &[next, amb.relations()]));
            let d = self.diff(k);
            let mut rows = Vec::new();
            for r in gen_rows[i].row_iter() {
                let img = d.apply(r);
                let y = solver
                    .solve(&img)
                    .ok_or_else(|| Error::NotWellDefined(format!("subcomplex not closed under d in degree {k}")))?;
                rows.push(y[..next.rows()].to_vec());
            }
            diffs.push(Mat::from_residue_rows(coef, next.rows(), rows));
        }
        let sub = Complex::new(coef, lo, mods, diffs)?;
        let map = ChainMap::new(&sub, self, incl.into_iter().zip(lo..).map(|(m, k)| (k, m)).collect())?;
        Ok((sub, map))
    }
}

/// A morphism of complexes, one matrix per degree.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    lo: i64,
    maps: Vec<Mat>,
}

impl ChainMap {
    /// Degrees not listed are zero. Checks well-definedness and commutation.
    pub fn new(source: &Complex, target: &Complex, maps: Vec<(i64, Mat)>) -> Result<Self> {
        let f = Self::new_unchecked(source, target, maps)?;
        f.check()?;
        Ok(f)
    }

    pub(crate) fn new_unchecked(source: &Complex, target: &Complex, maps: Vec<(i64, Mat)>) -> Result<Self> {
        let coef = source.coef();
        let lo = source.lo().min(target.lo());
        let hi = source.hi().max(target.hi());
        let mut dense: Vec<Mat> = (lo..=hi)
            .map(|k| Mat::zeros(coef, source.rank(k), target.rank(k)))
            .collect();
        for (k, m) in maps {
            if m.rows() != source.rank(k) || m.cols() != target.rank(k) {
                return Err(Error::DimensionMismatch(format!("chain map component in degree {k}")));
            }
            if k < lo || k > hi {
                if m.rows() * m.cols() != 0 && !m.is_zero() {
                    return Err(Error::DimensionMismatch(format!("chain map component outside range in degree {k}")));
                }
                continue;
            }
            dense[(k - lo) as usize] = m;
        }
        Ok(ChainMap {
            source: source.clone(),
            target: target.clone(),
            lo,
            maps: dense,
        })
    }

    fn check(&self) -> Result<()> {
        let lo = self.lo;
        let hi = lo + self.maps.len() as i64 - 1;
        for k in lo..=hi {
            let f = self.map(k);
            let tgt = self.target.module(k);
            for rel in self.source.module(k).relations().row_iter() {
                if !tgt.is_zero_elem(&f.apply(rel)) {
                    return Err(Error::NotWellDefined(format!("chain map in degree {k}")));
                }
            }
        }
        for k in lo - 1..=hi {
            let left = self.map(k).mul(&self.target.diff(k));
            let right = self.source.diff(k).mul(&self.map(k + 1));
            let diff = left.sub(&right);
            let tgt = self.target.module(k + 1);
            if !diff.row_iter().all(|r| tgt.is_zero_elem(r)) {
                return Err(Error::NotAChainMap(k));
            }
        }
        Ok(())
    }

    pub fn identity(c: &Complex) -> Self {
        let maps = c.degrees().map(|k| (k, Mat::identity(c.coef(), c.rank(k)))).collect();
        Self::new_unchecked(c, c, maps).expect("shapes match")
    }

    pub fn zero(source: &Complex, target: &Complex) -> Self {
        Self::new_unchecked(source, target, vec![]).expect("shapes match")
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn map(&self, k: i64) -> Mat {
        let i = k - self.lo;
        if i >= 0 && (i as usize) < self.maps.len() {
            self.maps[i as usize].clone()
        } else {
            Mat::zeros(self.source.coef(), self.source.rank(k), self.target.rank(k))
        }
    }

    pub fn component(&self, k: i64) -> ModMap {
        ModMap::new(self.source.module(k), self.target.module(k), self.map(k)).expect("validated chain map")
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        let lo = self.source.lo().min(other.target.lo());
        let hi = self.source.hi().max(other.target.hi());
        let maps = (lo..=hi).map(|k| (k, self.map(k).mul(&other.map(k)))).collect();
        ChainMap::new(&self.source, &other.target, maps)
    }

    /// Induced map `H^k(source) → H^k(target)`.
    pub fn on_cohomology(&self, k: i64) -> ModMap {
        self.source
            .cohomology_sq(k)
            .induced(&self.target.cohomology_sq(k), &self.map(k))
            .expect("chain maps preserve cocycles and coboundaries")
    }

    /// Degree range covering both source and target.
    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.source.lo().min(self.target.lo())..=self.source.hi().max(self.target.hi())
    }

    pub fn shift(&self, k: i64) -> ChainMap {
        let maps = self.degrees().map(|d| (d - k, self.map(d))).collect();
        ChainMap::new_unchecked(&self.source.shift(k), &self.target.shift(k), maps).expect("shapes match")
    }
}

/// `cone(f)` with its structural maps `B → cone(f)` and `cone(f) → A[1]`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: Complex,
    pub from_target: ChainMap,
    pub to_shifted_source: ChainMap,
}

/// Mapping cone: degree `k` is `A^{k+1} ⊕ B^k`, `d(a, b) = (-da, db - f(a))`.
pub fn cone(f: &ChainMap) -> Cone {
    let a = f.source();
    let b = f.target();
    let coef = a.coef();
    let lo = (a.lo() - 1).min(b.lo());
    let hi = (a.hi() - 1).max(b.hi());
    let mut mods = Vec::new();
    for k in lo..=hi {
        mods.push(FinMod::direct_sum(coef, &[a.module(k + 1), b.module(k)]));
    }
    let mut diffs = Vec::new();
    for k in lo..hi {
        let (ra, rb) = (a.rank(k + 1), b.rank(k));
        let (sa, sb) = (a.rank(k + 2), b.rank(k + 1));
        let mut d = Mat::zeros(coef, ra + rb, sa + sb);
        d.paste(0, 0, &a.diff(k + 1).neg());
        d.paste(0, sa, &f.map(k + 1).neg());
        d.paste(ra, sa, &b.diff(k));
        diffs.push(d);
    }
    let complex = Complex::new_unchecked(coef, lo, mods, diffs).expect("cone shapes");
    debug_assert!(complex.check().is_ok());
    let a1 = a.shift(1);
    let from_target = (lo..=hi)
        .map(|k| {
            let (ra, rb) = (a.rank(k + 1), b.rank(k));
            let mut m = Mat::zeros(coef, rb, ra + rb);
            m.paste(0, ra, &Mat::identity(coef, rb));
            (k, m)
        })
        .collect();
    let to_src = (lo..=hi)
        .map(|k| {
            let (ra, rb) = (a.rank(k + 1), b.rank(k));
            let mut m = Mat::zeros(coef, ra + rb, ra);
            m.paste(0, 0, &Mat::identity(coef, ra));
            (k, m)
        })
        .collect();
    Cone {
        from_target: ChainMap::new_unchecked(b, &complex, from_target).expect("shapes"),
        to_shifted_source: ChainMap::new_unchecked(&complex, &a1, to_src).expect("shapes"),
        complex,
    }
}

/// Outcome of a quasi-isomorphism test, computed two independent ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIso {
    /// Every induced map on cohomology is an isomorphism.
    pub by_cohomology: bool,
    /// The mapping cone is acyclic.
    pub by_cone: bool,
    /// Degrees where the induced map fails to be an isomorphism.
    pub failing_degrees: Vec<i64>,
}

impl QuasiIso {
    pub fn holds(&self) -> bool {
        self.by_cohomology && self.by_cone
    }

    pub fn consistent(&self) -> bool {
        self.by_cohomology == self.by_cone
    }
}

pub fn is_quasi_iso(f: &ChainMap) -> QuasiIso {
    let failing: Vec<i64> = f.degrees().filter(|&k| !f.on_cohomology(k).is_iso()).collect();
    let c = cone(f);
    QuasiIso {
        by_cohomology: failing.is_empty(),
        by_cone: c.complex.is_acyclic(),
        failing_degrees: failing,
    }
}

/// Bigraded modules with horizontal `d_h: (p,q) → (p+1,q)` and vertical
/// `d_v: (p,q) → (p,q+1)` differentials whose squares commute.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    coef: Coef,
    p_lo: i64,
    q_lo: i64,
    entries: Vec<Vec<FinMod>>,
    dh: Vec<Vec<Mat>>,
    dv: Vec<Vec<Mat>>,
}

impl DoubleComplex {
    /// `entries[p][q]`; `dh[p][q]` for `p` below the last column, `dv[p][q]`
    /// for `q` below the last row.
    pub fn new(
        coef: Coef,
        p_lo: i64,
        q_lo: i64,
        entries: Vec<Vec<FinMod>>,
        dh: Vec<Vec<Mat>>,
        dv: Vec<Vec<Mat>>,
    ) -> Result<Self> {
        let np = entries.len();
        let nq = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|c| c.len() != nq) {
            return Err(Error::NotADoubleComplex("ragged columns".into()));
        }
        if dh.len() != np.saturating_sub(1) || dh.iter().any(|c| c.len() != nq) {
            return Err(Error::NotADoubleComplex("horizontal maps have the wrong shape".into()));
        }
        if dv.len() != np || dv.iter().any(|c| c.len() != nq.saturating_sub(1)) {
            return Err(Error::NotADoubleComplex("vertical maps have the wrong shape".into()));
        }
        let d = DoubleComplex {
            coef,
            p_lo,
            q_lo,
            entries,
            dh,
            dv,
        };
        d.check()?;
        Ok(d)
    }

    fn check(&self) -> Result<()> {
        let (np, nq) = self.shape();
        for p in 0..np {
            for q in 0..nq {
                let (pp, qq) = (self.p_lo + p as i64, self.q_lo + q as i64);
                let e = &self.entries[p][q];
                let h = self.h(pp, qq);
                let v = self.v(pp, qq);
                if h.rows() != e.rank() || v.rows() != e.rank() {
                    return Err(Error::NotADoubleComplex(format!("map shapes at ({pp},{qq})")));
                }
                let zero_in = |m: &Mat, tgt: &FinMod| m.row_iter().all(|r| tgt.is_zero_elem(r));
                let th = self.entry(pp + 1, qq);
                let tv = self.entry(pp, qq + 1);
                if !zero_in(&h.mul(&self.h(pp + 1, qq)), &self.entry(pp + 2, qq)) {
                    return Err(Error::NotADoubleComplex(format!("d_h∘d_h ≠ 0 at ({pp},{qq})")));
                }
                if !zero_in(&v.mul(&self.v(pp, qq + 1)), &self.entry(pp, qq + 2)) {
                    return Err(Error::NotADoubleComplex(format!("d_v∘d_v ≠ 0 at ({pp},{qq})")));
                }
                let hv = h.mul(&self.v(pp + 1, qq));
                let vh = v.mul(&self.h(pp, qq + 1));
                if !zero_in(&hv.sub(&vh), &self.entry(pp + 1, qq + 1)) {
                    return Err(Error::NotADoubleComplex(format!("square at ({pp},{qq}) does not commute")));
                }
                for rel in e.relations().row_iter() {
                    if !th.is_zero_elem(&h.apply(rel)) || !tv.is_zero_elem(&v.apply(rel)) {
                        return Err(Error::NotWellDefined(format!("double complex map at ({pp},{qq})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn coef(&self) -> Coef {
        self.coef
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.entries.len(), self.entries.first().map_or(0, Vec::len))
    }

    pub fn p_range(&self) -> std::ops::Range<i64> {
        self.p_lo..self.p_lo + self.shape().0 as i64
    }

    pub fn q_range(&self) -> std::ops::Range<i64> {
        self.q_lo..self.q_lo + self.shape().1 as i64
    }

    fn at(&self, p: i64, q: i64) -> Option<(usize, usize)> {
        let (np, nq) = self.shape();
        let (i, j) = (p - self.p_lo, q - self.q_lo);
        (i >= 0 && j >= 0 && (i as usize) < np && (j as usize) < nq).then_some((i as usize, j as usize))
    }

    pub fn entry(&self, p: i64, q: i64) -> FinMod {
        self.at(p, q).map_or_else(|| FinMod::zero(self.coef), |(i, j)| self.entries[i][j].clone())
    }

    pub fn rank(&self, p: i64, q: i64) -> usize {
        self.at(p, q).map_or(0, |(i, j)| self.entries[i][j].rank())
    }

    pub fn h(&self, p: i64, q: i64) -> Mat {
        match (self.at(p, q), self.at(p + 1, q)) {
            (Some((i, j)), Some(_)) => self.dh[i][j].clone(),
            _ => Mat::zeros(self.coef, self.rank(p, q), self.rank(p + 1, q)),
        }
    }

    pub fn v(&self, p: i64, q: i64) -> Mat {
        match (self.at(p, q), self.at(p, q + 1)) {
            (Some((i, j)), Some(_)) => self.dv[i][j].clone(),
            _ => Mat::zeros(self.coef, self.rank(p, q), self.rank(p, q + 1)),
        }
    }

    /// Column `p` as a complex in the `q` direction.
    pub fn column(&self, p: i64) -> Complex {
        let qs: Vec<i64> = self.q_range().collect();
        let mods = qs.iter().map(|&q| self.entry(p, q)).collect();
        let diffs = qs.iter().take(qs.len().saturating_sub(1)).map(|&q| self.v(p, q)).collect();
        Complex::new_unchecked(self.coef, self.q_lo, mods, diffs).expect("column shapes")
    }

    /// Row `q` as a complex in the `p` direction.
    pub fn row(&self, q: i64) -> Complex {
        let ps: Vec<i64> = self.p_range().collect();
        let mods = ps.iter().map(|&p| self.entry(p, q)).collect();
        let diffs = ps.iter().take(ps.len().saturating_sub(1)).map(|&p| self.h(p, q)).collect();
        Complex::new_unchecked(self.coef, self.p_lo, mods, diffs).expect("row shapes")
    }

    /// Offsets of the `(p, n-p)` blocks inside `Tot^n`, `p` ascending.
    pub fn total_layout(&self, n: i64) -> Vec<(i64, i64, usize)> {
        let mut off = 0;
        let mut out = Vec::new();
        for p in self.p_range() {
            let q = n - p;
            if self.at(p, q).is_some() {
                out.push((p, q, off));
                off += self.rank(p, q);
            }
        }
        out
    }
}

/// `Tot^n = ⊕_{p+q=n} D^{p,q}` with `d = d_h + (-1)^p d_v`.
pub fn total(d: &DoubleComplex) -> Complex {
    let coef = d.coef();
    let (np, nq) = d.shape();
    if np == 0 || nq == 0 {
        return Complex::zero(coef);
    }
    let lo = d.p_lo + d.q_lo;
    let hi = lo + np as i64 + nq as i64 - 2;
    let mut mods = Vec::new();
    for n in lo..=hi {
        let parts: Vec<FinMod> = d.total_layout(n).iter().map(|&(p, q, _)| d.entry(p, q)).collect();
        mods.push(FinMod::direct_sum(coef, &parts));
    }
    let mut diffs = Vec::new();
    for n in lo..hi {
        let src = d.total_layout(n);
        let dst = d.total_layout(n + 1);
        let rows: usize = src.iter().map(|&(p, q, _)| d.rank(p, q)).sum();
        let cols: usize = dst.iter().map(|&(p, q, _)| d.rank(p, q)).sum();
        let mut m = Mat::zeros(coef, rows, cols);
        for &(p, q, ro) in &src {
            for &(pp, qq, co) in &dst {
                if pp == p + 1 && qq == q {
                    m.paste(ro, co, &d.h(p, q));
                } else if pp == p && qq == q + 1 {
                    m.paste(ro, co, &d.v(p, q).scale(sign(p)));
                }
            }
        }
        diffs.push(m);
    }
    let c = Complex::new_unchecked(coef, lo, mods, diffs).expect("total shapes");
    debug_assert!(c.check().is_ok(), "total complex must square to zero");
    c
}

/// Connecting morphisms of a termwise short exact sequence `0 → A → B → C → 0`.
#[derive(Clone, Debug)]
pub struct Connecting {
    /// `(k, δ^k: H^k(C) → H^{k+1}(A))`.
    pub maps: Vec<(i64, ModMap)>,
}

impl Connecting {
    pub fn at(&self, k: i64) -> Option<&ModMap> {
        self.maps.iter().find(|(d, _)| *d == k).map(|(_, m)| m)
    }
}

/// Checks termwise exactness of `0 → A →i B →p C → 0`.
pub fn check_ses(i: &ChainMap, p: &ChainMap) -> Result<()> {
    if i.target() != p.source() {
        return Err(Error::NotExact("middle complexes differ".into()));
    }
    for k in i.degrees().chain(p.degrees()) {
        let ik = i.component(k);
        let pk = p.component(k);
        if !ik.is_injective() {
            return Err(Error::NotExact(format!("A → B not injective in degree {k}")));
        }
        if !pk.is_surjective() {
            return Err(Error::NotExact(format!("B → C not surjective in degree {k}")));
        }
        if !ik.then(&pk).map(|c| c.is_zero()).unwrap_or(false) {
            return Err(Error::NotExact(format!("composite nonzero in degree {k}")));
        }
        if ik.source().order_exp() + pk.target().order_exp() != ik.target().order_exp() {
            return Err(Error::NotExact(format!("orders do not multiply in degree {k}")));
        }
    }
    Ok(())
}

/// Snake-lemma connecting maps: lift a cocycle of `C` to `B`, apply `d`, and
/// read the result back in `A`.
pub fn connecting_of_ses(i: &ChainMap, p: &ChainMap) -> Result<Connecting> {
    check_ses(i, p)?;
    let (a, b, c) = (i.source(), i.target(), p.target());
    let lo = a.lo().min(b.lo()).min(c.lo()) - 1;
    let hi = a.hi().max(b.hi()).max(c.hi());
    let maps = (lo..=hi)
        .map(|k| Ok((k, connecting_at(i, p, k)?)))
        .collect::<Result<_>>()?;
    Ok(Connecting { maps })
}

/// The connecting map `H^k(C) → H^{k+1}(A)` alone. Termwise exactness is
/// assumed; a failed lift is reported as `NotExact`.
pub fn connecting_at(i: &ChainMap, p: &ChainMap, k: i64) -> Result<ModMap> {
    let (a, b, c) = (i.source(), i.target(), p.target());
    let coef = a.coef();
    let hc = c.cohomology_sq(k);
    let ha = a.cohomology_sq(k + 1);
    let lift_solver = Solver::new(&Mat::vstack(coef, c.rank(k), &[&p.map(k), c.module(k).relations()]));
    let back_solver = Solver::new(&Mat::vstack(
        coef,
        b.rank(k + 1),
        &[&i.map(k + 1), b.module(k + 1).relations()],
    ));
    let db = b.diff(k);
    let r = hc.module().rank();
    let mut rows = Vec::with_capacity(r);
    for g in 0..r {
        let mut e = vec![0u64; r];
        e[g] = 1;
        let cv = hc.lift(&e);
        let bv = lift_solver
            .solve(&cv)
            .ok_or_else(|| Error::NotExact(format!("cannot lift in degree {k}")))?;
        let dbv = db.apply(&bv[..b.rank(k)]);
        let av = back_solver
            .solve(&dbv)
            .ok_or_else(|| Error::NotExact(format!("boundary not in A in degree {}", k + 1)))?;
        rows.push(ha.reduce(&av[..a.rank(k + 1)])?);
    }
    ModMap::new(
        hc.module().clone(),
        ha.module().clone(),
        Mat::from_residue_rows(coef, ha.module().rank(), rows),
    )
}

/// One node of a long exact sequence with its exactness verdict.
#[derive(Clone, Debug)]
pub struct LesNode {
    pub label: String,
    pub composite_zero: bool,
    pub exact: bool,
}

/// Verifies the long exact sequence
/// `… → H^k(A) → H^k(B) → H^k(C) → H^{k+1}(A) → …` node by node.
pub fn long_exact_sequence(i: &ChainMap, p: &ChainMap, delta: &Connecting) -> Vec<LesNode> {
    let a = i.source();
    let b = i.target();
    let c = p.target();
    let lo = a.lo().min(b.lo()).min(c.lo()) - 1;
    let hi = a.hi().max(b.hi()).max(c.hi()) + 1;
    let mut seq: Vec<(String, ModMap)> = Vec::new();
    for k in lo..=hi {
        seq.push((format!("H^{k}(A)→H^{k}(B)"), i.on_cohomology(k)));
        seq.push((format!("H^{k}(B)→H^{k}(C)"), p.on_cohomology(k)));
        let d = delta.at(k).cloned().unwrap_or_else(|| {
            ModMap::zero(&c.cohomology(k), &a.cohomology(k + 1))
        });
        seq.push((format!("H^{k}(C)→H^{}(A)", k + 1), d));
    }
    seq.windows(2)
        .map(|w| {
            let (f, g) = (&w[0].1, &w[1].1);
            let composite_zero = f.then(g).map(|h| h.is_zero()).unwrap_or(false);
            LesNode {
                label: format!("{} ; {}", w[0].0, w[1].0),
                composite_zero,
                exact: composite_zero && f.image_order_exp() == g.kernel_order_exp(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> Coef {
        Coef::new(2, 2).unwrap()
    }

    /// `[Z/4 --×2--> Z/4]` in degrees 0, 1.
    fn times_two() -> Complex {
        let c = z4();
        Complex::new(
            c,
            0,
            vec![FinMod::free(c, 1), FinMod::free(c, 1)],
            vec![Mat::scalar(c, 1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn cohomology_of_times_two() {
        let k = times_two();
        assert_eq!(k.cohomology(0).invariant_factors(), vec![1]);
        assert_eq!(k.cohomology(1).invariant_factors(), vec![1]);
    }

    #[test]
    fn non_complex_is_rejected() {
        let c = z4();
        let r = Complex::new(
            c,
            0,
            vec![FinMod::free(c, 1); 3],
            vec![Mat::scalar(c, 1, 1), Mat::scalar(c, 1, 1)],
        );
        assert!(matches!(r, Err(Error::NotAComplex(0))));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = Coef::new(2, 1).unwrap();
        let k = Complex::concentrated(FinMod::free(c, 1), 0);
        let cn = cone(&ChainMap::identity(&k));
        assert!(cn.complex.is_acyclic());
    }

    #[test]
    fn cone_of_zero_map_splits() {
        let a = times_two();
        let b = Complex::concentrated(FinMod::free(z4(), 2), 0);
        let cn = cone(&ChainMap::zero(&a, &b));
        for k in -2..=2 {
            let expect = FinMod::direct_sum(z4(), &[a.cohomology(k + 1), b.cohomology(k)]);
            assert!(cn.complex.cohomology(k).is_isomorphic(&expect), "degree {k}");
        }
    }

    #[test]
    fn reduction_to_z2_is_not_quasi_iso() {
        let c = z4();
        let src = times_two();
        let z2 = FinMod::cyclic(c, 1);
        let tgt = Complex::new(c, 0, vec![z2.clone(), FinMod::zero(c)], vec![Mat::zeros(c, 1, 0)]).unwrap();
        let f = ChainMap::new(&src, &tgt, vec![(0, Mat::identity(c, 1))]).unwrap();
        let q = is_quasi_iso(&f);
        assert!(q.consistent());
        assert!(!q.holds());
        // The cocycle 2 ∈ Z/4 maps to 0 ∈ Z/2.
        assert_eq!(q.failing_degrees, vec![0, 1]);
        assert!(f.on_cohomology(0).is_zero());
    }

    #[test]
    fn shift_identities() {
        let k = times_two();
        assert_eq!(k.shift(0), k);
        assert_eq!(k.shift(1).shift(-1), k);
        for i in -2..2 {
            assert!(k.shift(1).cohomology(i).is_isomorphic(&k.cohomology(i + 1)));
        }
    }

    #[test]
    fn square_of_identities_totalizes_to_acyclic() {
        let c = Coef::new(2, 1).unwrap();
        let m = FinMod::free(c, 1);
        let id = Mat::identity(c, 1);
        let d = DoubleComplex::new(
            c,
            0,
            0,
            vec![vec![m.clone(), m.clone()], vec![m.clone(), m.clone()]],
            vec![vec![id.clone(), id.clone()]],
            vec![vec![id.clone()], vec![id.clone()]],
        )
        .unwrap();
        let t = total(&d);
        assert!(t.is_acyclic());
    }

    #[test]
    fn single_row_totalizes_to_itself() {
        let k = times_two();
        let c = z4();
        let d = DoubleComplex::new(
            c,
            0,
            0,
            vec![vec![k.module(0)], vec![k.module(1)]],
            vec![vec![k.diff(0)]],
            vec![vec![], vec![]],
        )
        .unwrap();
        assert_eq!(total(&d), k);
    }

    #[test]
    fn connecting_map_of_non_split_ses() {
        let c = z4();
        let b = times_two();
        // A = [0 → Z/2] with Z/2 = 2·Z/4 ⊆ B^1.
        let a = Complex::new(c, 0, vec![FinMod::zero(c), FinMod::cyclic(c, 1)], vec![Mat::zeros(c, 0, 1)]).unwrap();
        let cc = Complex::new(c, 0, vec![FinMod::free(c, 1), FinMod::cyclic(c, 1)], vec![Mat::zeros(c, 1, 1)]).unwrap();
        let i = ChainMap::new(&a, &b, vec![(1, Mat::scalar(c, 1, 2))]).unwrap();
        let p = ChainMap::new(&b, &cc, vec![(0, Mat::identity(c, 1)), (1, Mat::identity(c, 1))]).unwrap();
        let delta = connecting_of_ses(&i, &p).unwrap();
        let d0 = delta.at(0).unwrap();
        assert_eq!(d0.source().invariant_factors(), vec![2]);
        assert_eq!(d0.target().invariant_factors(), vec![1]);
        assert!(d0.is_surjective());
        assert!(long_exact_sequence(&i, &p, &delta).iter().all(|n| n.exact));
    }

    #[test]
    fn split_ses_has_zero_connecting_map() {
        let c = z4();
        let a = times_two();
        let cc = Complex::concentrated(FinMod::free(c, 1), 0);
        let b = Complex::new(
            c,
            0,
            vec![FinMod::free(c, 2), FinMod::free(c, 1)],
            vec![Mat::from_rows(c, 1, &[vec![2], vec![0]]).unwrap()],
        )
        .unwrap();
        let i = ChainMap::new(
            &a,
            &b,
            vec![(0, Mat::from_rows(c, 2, &[vec![1, 0]]).unwrap()), (1, Mat::identity(c, 1))],
        )
        .unwrap();
        let p = ChainMap::new(&b, &cc, vec![(0, Mat::from_rows(c, 1, &[vec![0], vec![1]]).unwrap())]).unwrap();
        let delta = connecting_of_ses(&i, &p).unwrap();
        assert!(delta.maps.iter().all(|(_, m)| m.is_zero()));
    }
}
