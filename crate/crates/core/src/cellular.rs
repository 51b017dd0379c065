//! Concentrating filtrations by closed subsets, the cellular complex they
//! produce, and explicit quasi-isomorphisms back to the nerve complex.

use crate::complex::{cone, connecting_at, is_quasi_iso, ChainMap, Complex, QuasiIso};
use crate::error::{Error, Result};
use crate::linalg::{FinMod, Mat, ModMap, Subquotient};
use crate::space::{pair_complex, pair_map, FinSpace, PairComplex, PointSet, WCSheaf};

/// `∅ = X_{-1} ⊆ X_0 ⊆ … ⊆ X_n = top` by subsets closed in `top`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    top: PointSet,
    levels: Vec<PointSet>,
}

impl Filtration {
    /// Filtration of the whole space; needs exactly `dim X + 1` levels.
    pub fn new(space: &FinSpace, levels: Vec<PointSet>) -> Result<Self> {
        let dim = space.dim().max(0) as usize;
        if levels.len() != dim + 1 {
            return Err(Error::InvalidFiltration(format!(
                "{} levels for a space of dimension {dim}",
                levels.len()
            )));
        }
        Self::of_subset(space, space.all(), levels)
    }

    /// Filtration of the subspace `top` with any number of levels.
    pub fn of_subset(space: &FinSpace, top: PointSet, levels: Vec<PointSet>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidFiltration("no levels".into()));
        }
        if *levels.last().unwrap() != top {
            return Err(Error::InvalidFiltration(format!(
                "top level {} is not {}",
                space.describe(*levels.last().unwrap()),
                space.describe(top)
            )));
        }
        let mut prev = PointSet::EMPTY;
        for (i, &l) in levels.iter().enumerate() {
            if !prev.is_subset(l) {
                return Err(Error::InvalidFiltration(format!("level {i} does not contain level {}", i as i64 - 1)));
            }
            if !is_closed_in(space, l, top) {
                return Err(Error::InvalidFiltration(format!("level {i} = {} is not closed", space.describe(l))));
            }
            prev = l;
        }
        Ok(Filtration { top, levels })
    }

    pub fn top(&self) -> PointSet {
        self.top
    }

    /// Index of the last level.
    pub fn n(&self) -> usize {
        self.levels.len() - 1
    }

    /// `X_i`, with `X_{-1} = ∅` and `X_i = top` above `n`.
    pub fn level(&self, i: i64) -> PointSet {
        if i < 0 {
            PointSet::EMPTY
        } else if i as usize >= self.levels.len() {
            self.top
        } else {
            self.levels[i as usize]
        }
    }

    pub fn levels(&self) -> &[PointSet] {
        &self.levels
    }

    /// The same levels viewed with `n` raised to `len - 1` (padding with `top`).
    pub fn padded(&self, len: usize) -> Filtration {
        let mut levels = self.levels.clone();
        while levels.len() < len {
            levels.push(self.top);
        }
        Filtration { top: self.top, levels }
    }

    pub fn describe(&self, space: &FinSpace) -> Vec<String> {
        self.levels.iter().map(|&l| space.describe(l)).collect()
    }
}

fn is_closed_in(space: &FinSpace, s: PointSet, top: PointSet) -> bool {
    s.is_subset(top) && s.iter().all(|x| space.down(x).inter(top).is_subset(s))
}

/// `H^*(X_i, X_{i-1}; F)` for one level.
#[derive(Clone, Debug)]
pub struct LevelReport {
    pub level: usize,
    /// `(q, invariant factors of H^q)` for every degree carrying a cochain.
    pub cohomology: Vec<(i64, Vec<u32>)>,
    pub concentrated: bool,
}

#[derive(Clone, Debug)]
pub struct FiltrationReport {
    pub levels: Vec<LevelReport>,
    pub valid: bool,
}

impl FiltrationReport {
    pub fn first_failure(&self) -> Option<&LevelReport> {
        self.levels.iter().find(|l| !l.concentrated)
    }
}

/// Is `H^q(sub, rel; F)` zero for every `q ≠ i`?
fn concentrated_in(f: &WCSheaf, sub: PointSet, rel: PointSet, i: i64) -> Result<bool> {
    let c = pair_complex(f, sub, rel)?.complex;
    Ok(c.degrees().filter(|&q| q != i).all(|q| c.cohomology(q).is_zero()))
}

pub fn validate_filtration(f: &WCSheaf, filt: &Filtration) -> Result<FiltrationReport> {
    let mut levels = Vec::new();
    for i in 0..=filt.n() {
        let c = pair_complex(f, filt.level(i as i64), filt.level(i as i64 - 1))?.complex;
        let cohomology: Vec<(i64, Vec<u32>)> = c.cohomology_profile();
        let concentrated = cohomology.iter().all(|(q, inv)| *q == i as i64 || inv.is_empty());
        levels.push(LevelReport {
            level: i,
            cohomology,
            concentrated,
        });
    }
    let valid = levels.iter().all(|l| l.concentrated);
    Ok(FiltrationReport { levels, valid })
}

fn require_valid(f: &WCSheaf, filt: &Filtration) -> Result<()> {
    let r = validate_filtration(f, filt)?;
    match r.first_failure() {
        None => Ok(()),
        Some(l) => Err(Error::InvalidFiltration(format!(
            "level {} is not concentrated: {:?}",
            l.level, l.cohomology
        ))),
    }
}

/// Constraints for [`search_filtration_with`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Subspace to filter.
    pub top: PointSet,
    /// Index of the last level.
    pub n: usize,
    /// Per-level lower bounds (closed hulls are taken), length `n + 1`.
    pub lower: Vec<PointSet>,
    /// Per-level upper bounds, length `n + 1`.
    pub upper: Vec<PointSet>,
    /// Require `dim X_i ≤ i` below the top.
    pub dim_bound: bool,
    /// Maximum number of candidate levels examined.
    pub budget: usize,
}

impl SearchOptions {
    pub fn for_space(space: &FinSpace) -> Self {
        let n = space.dim().max(0) as usize;
        Self::for_subset(space.all(), n)
    }

    pub fn for_subset(top: PointSet, n: usize) -> Self {
        SearchOptions {
            top,
            n,
            lower: vec![PointSet::EMPTY; n + 1],
            upper: vec![top; n + 1],
            dim_bound: true,
            budget: 200_000,
        }
    }
}

/// Finds `X_{n-1} ⊇ seed` with `H^q(X, X_{n-1}; F) = 0` for `q ≠ n`, then
/// recurses downwards. Larger candidates are tried first.
pub fn search_filtration(f: &WCSheaf, seed: PointSet) -> Result<Filtration> {
    let space = f.space();
    if space.dim_of(space.closure(seed)) >= space.dim().max(1) {
        return Err(Error::PreconditionFailed(format!(
            "seed {} is not of lower dimension",
            space.describe(seed)
        )));
    }
    let mut opts = SearchOptions::for_space(space);
    if opts.n > 0 {
        opts.lower[opts.n - 1] = seed;
    }
    search_filtration_with(f, &opts)
}

pub fn search_filtration_with(f: &WCSheaf, opts: &SearchOptions) -> Result<Filtration> {
    let space = f.space();
    let n = opts.n;
    let top = opts.top;
    if opts.lower.len() != n + 1 || opts.upper.len() != n + 1 {
        return Err(Error::DimensionMismatch("search bounds need n + 1 entries".into()));
    }
    // Every level must contain the lower bounds of the levels beneath it.
    let mut lower = vec![PointSet::EMPTY; n + 1];
    let mut acc = PointSet::EMPTY;
    for i in 0..=n {
        acc = acc.union(opts.lower[i]);
        lower[i] = space.down_closure_in(acc, top);
    }
    if !lower[n].is_subset(top) || !opts.upper[n].inter(top).eq(&top) {
        return Err(Error::NotFound("bounds exclude the top level".into()));
    }
    let mut levels = vec![PointSet::EMPTY; n + 1];
    levels[n] = top;
    let mut budget = opts.budget;
    let ok = search_rec(f, opts, &lower, n, &mut levels, &mut budget)?;
    if !ok {
        let why = if budget == 0 { "search budget exhausted" } else { "no concentrating filtration" };
        return Err(Error::NotFound(format!("{why} for {}", space.describe(top))));
    }
    let filt = Filtration::of_subset(space, top, levels)?;
    require_valid(f, &filt)?;
    Ok(filt)
}

/// Levels `> i` are fixed in `levels`; chooses `X_{i-1}` (or checks `X_0`).
fn search_rec(
    f: &WCSheaf,
    opts: &SearchOptions,
    lower: &[PointSet],
    i: usize,
    levels: &mut Vec<PointSet>,
    budget: &mut usize,
) -> Result<bool> {
    let space = f.space();
    let cur = levels[i];
    if i == 0 {
        return concentrated_in(f, cur, PointSet::EMPTY, 0);
    }
    let upper = opts.upper[i - 1].inter(cur);
    if !lower[i - 1].is_subset(upper) {
        return Ok(false);
    }
    let mut cands: Vec<PointSet> = space
        .closed_between_in(opts.top, lower[i - 1], upper)
        .into_iter()
        .filter(|&y| is_closed_in(space, y, opts.top))
        .filter(|&y| !opts.dim_bound || space.dim_of(y) < i as i64)
        .collect();
    cands.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.iter().cmp(b.iter())));
    cands.dedup();
    for y in cands {
        if *budget == 0 {
            return Ok(false);
        }
        *budget -= 1;
        if !concentrated_in(f, cur, y, i as i64)? {
            continue;
        }
        levels[i - 1] = y;
        if search_rec(f, opts, lower, i - 1, levels, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `X_i` = faces of dimension at most `i`.
pub fn skeleton_filtration(space: &FinSpace) -> Result<Filtration> {
    space.check_face_poset()?;
    let n = space.dim().max(0) as usize;
    let levels = (0..=n)
        .map(|i| PointSet::from_points((0..space.len()).filter(|&x| space.height(x) <= i)))
        .collect();
    Filtration::new(space, levels)
}

/// The complex `D` with `D^i = H^i(X_i, X_{i-1}; F)` and differential equal to
/// minus the connecting map of the triple `(X_{i+1}, X_i, X_{i-1})`.
#[derive(Clone, Debug)]
pub struct Cellular {
    pub filt: Filtration,
    pub d: Complex,
    /// `A_i`, the cochains of `(X_i, X_{i-1})`.
    pub rel: Vec<PairComplex>,
    /// `D^i` as a subquotient of `A_i^i`.
    pub h: Vec<Subquotient>,
}

pub fn cellular_complex(f: &WCSheaf, filt: &Filtration) -> Result<Cellular> {
    require_valid(f, filt)?;
    cellular_unchecked(f, filt)
}

fn cellular_unchecked(f: &WCSheaf, filt: &Filtration) -> Result<Cellular> {
    let coef = f.coef();
    let n = filt.n() as i64;
    let mut rel = Vec::new();
    let mut h = Vec::new();
    for i in 0..=n {
        let a = pair_complex(f, filt.level(i), filt.level(i - 1))?;
        h.push(a.complex.cohomology_sq(i));
        rel.push(a);
    }
    let mut diffs = Vec::new();
    for i in 0..n {
        let outer = pair_complex(f, filt.level(i + 1), filt.level(i - 1))?;
        let incl = pair_map(f, &rel[(i + 1) as usize], &outer)?;
        let proj = pair_map(f, &outer, &rel[i as usize])?;
        let delta = connecting_at(&incl, &proj, i)?;
        diffs.push(delta.matrix().neg());
    }
    let modules: Vec<FinMod> = h.iter().map(|s| s.module().clone()).collect();
    let d = Complex::new(coef, 0, modules, diffs)?;
    Ok(Cellular {
        filt: filt.clone(),
        d,
        rel,
        h,
    })
}

/// The décalage subcomplex `W ⊆ N` of the nerve complex, with
/// `W^k = {c vanishing on X_{k-1} : dc vanishes on X_k}`, and the maps
/// `W ↪ N`, `φ: W → D`, `φ^k(c) = (-1)^k [c|_{X_k}]`.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub nerve: PairComplex,
    pub w: Complex,
    pub incl: ChainMap,
    pub phi: ChainMap,
}

impl Comparison {
    /// `ψ^k = H^k(incl) ∘ H^k(φ)^{-1}: H^k(D) → H^k(N)`.
    pub fn psi(&self, k: i64) -> Result<ModMap> {
        let inv = self.phi.on_cohomology(k).inverse()?;
        inv.then(&self.incl.on_cohomology(k))
    }
}

fn coord_block(f: &WCSheaf, chain: &[usize]) -> usize {
    f.stalk(*chain.last().unwrap()).rank()
}

pub fn comparison(f: &WCSheaf, cell: &Cellular) -> Result<Comparison> {
    let coef = f.coef();
    let filt = &cell.filt;
    let nerve = pair_complex(f, filt.top(), PointSet::EMPTY)?;
    let nc = &nerve.complex;
    let mut gens = Vec::new();
    for k in nc.degrees() {
        let p = k as usize;
        let below = filt.level(k - 1);
        let within = filt.level(k);
        // F^k: coordinates on chains whose top point avoids X_{k-1}.
        let mut fk: Vec<(usize, usize)> = nerve
            .chains(p)
            .filter(|(c, _)| !below.contains(*c.last().unwrap()))
            .map(|(c, o)| (o, *c.last().unwrap()))
            .collect();
        fk.sort_unstable();
        let fk_mod = FinMod::direct_sum(coef, &fk.iter().map(|&(_, x)| f.stalk(x).clone()).collect::<Vec<_>>());
        let mut e = Mat::zeros(coef, fk_mod.rank(), nc.rank(k));
        let mut r = 0;
        for &(o, x) in &fk {
            let w = f.stalk(x).rank();
            e.paste(r, o, &Mat::identity(coef, w));
            r += w;
        }
        // Q: coordinates of N^{k+1} on chains inside X_k.
        let mut q: Vec<(usize, usize)> = nerve
            .chains(p + 1)
            .filter(|(c, _)| c.iter().all(|&x| within.contains(x)))
            .map(|(c, o)| (o, *c.last().unwrap()))
            .collect();
        q.sort_unstable();
        let q_cols: Vec<usize> = q.iter().flat_map(|&(o, x)| o..o + f.stalk(x).rank()).collect();
        let q_mod = FinMod::direct_sum(coef, &q.iter().map(|&(_, x)| f.stalk(x).clone()).collect::<Vec<_>>());
        let t = e.mul(&nc.diff(k)).select_cols(&q_cols);
        let ker = ModMap::new(fk_mod, q_mod, t)?.kernel_gens();
        gens.push((k, ker.mul(&e)));
    }
    let (w, incl) = nc.subcomplex(&gens)?;
    let mut phi = Vec::new();
    for k in w.degrees() {
        let p = k as usize;
        if k > filt.n() as i64 {
            continue;
        }
        let a = &cell.rel[p];
        let mut sel = vec![None; nc.rank(k)];
        for (c, o) in a.chains(p) {
            let no = nerve.offset(p, c).expect("pair chains are nerve chains");
            for j in 0..coord_block(f, c) {
                sel[no + j] = Some(o + j);
            }
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let g = incl.map(k);
        let mut rows = Vec::new();
        for row in g.row_iter() {
            let mut v = vec![0u64; a.complex.rank(k)];
            for (j, &x) in row.iter().enumerate() {
                if let Some(t) = sel[j] {
                    v[t] = x;
                }
            }
            let red = cell.h[p].reduce(&v)?;
            rows.push(red.iter().map(|&x| coef.mul(x, coef.reduce(sign))).collect());
        }
        phi.push((k, Mat::from_residue_rows(coef, cell.h[p].module().rank(), rows)));
    }
    let phi = ChainMap::new(&w, &cell.d, phi)?;
    Ok(Comparison { nerve, w, incl, phi })
}

/// One verified quasi-isomorphism of the reduction chain.
#[derive(Clone, Debug)]
pub struct WitnessStep {
    pub name: String,
    pub source: Vec<(i64, Vec<u32>)>,
    pub target: Vec<(i64, Vec<u32>)>,
    pub quasi_iso: QuasiIso,
}

#[derive(Clone, Debug)]
pub struct ReductionWitness {
    pub steps: Vec<WitnessStep>,
    /// The cellular complex, reached by the last step.
    pub terminal: Complex,
    pub comparison: Comparison,
}

impl ReductionWitness {
    pub fn all_quasi_iso(&self) -> bool {
        self.steps.iter().all(|s| s.quasi_iso.holds())
    }
}

fn step(name: String, f: &ChainMap) -> Result<WitnessStep> {
    let q = is_quasi_iso(f);
    if !q.holds() || !q.consistent() {
        return Err(Error::WitnessFailure(name));
    }
    Ok(WitnessStep {
        source: f.source().cohomology_profile(),
        target: f.target().cohomology_profile(),
        name,
        quasi_iso: q,
    })
}

/// Quotient truncation `τ_{≥a} C` with the projection `C → τ_{≥a} C`.
fn truncate_above(c: &Complex, a: i64) -> Result<(Complex, ChainMap)> {
    let coef = c.coef();
    let hi = c.hi().max(a);
    let mut mods = Vec::new();
    for k in a..=hi {
        let m = c.module(k);
        if k == a {
            let rel = Mat::vstack(coef, m.rank(), &[m.relations(), &c.diff(a - 1)]);
            mods.push(FinMod::new(coef, m.rank(), &rel)?);
        } else {
            mods.push(m);
        }
    }
    let diffs = (a..hi).map(|k| c.diff(k)).collect();
    let t = Complex::new(coef, a, mods, diffs)?;
    let maps = (a..=hi).map(|k| (k, Mat::identity(coef, c.rank(k)))).collect();
    let p = ChainMap::new(c, &t, maps)?;
    Ok((t, p))
}

/// Builds the chain of quasi-isomorphisms from the nerve complexes
/// `B_a = N(X_a)` and relative complexes `A_a` down to `D`.
pub fn reduce_with_witness(f: &WCSheaf, filt: &Filtration) -> Result<ReductionWitness> {
    let cell = cellular_complex(f, filt)?;
    let coef = f.coef();
    let n = filt.n() as i64;
    let mut steps = Vec::new();
    for a in 0..=n {
        let b_a = pair_complex(f, filt.level(a), PointSet::EMPTY)?;
        let b_prev = pair_complex(f, filt.level(a - 1), PointSet::EMPTY)?;
        let a_a = &cell.rel[a as usize];
        let r = pair_map(f, &b_a, &b_prev)?;
        let i = pair_map(f, a_a, &b_a)?;
        let cr = cone(&r);
        let ac = &a_a.complex;
        let a1 = ac.shift(1);
        let maps = a1
            .degrees()
            .map(|k| {
                let mut m = Mat::zeros(coef, a1.rank(k), cr.complex.rank(k));
                m.paste(0, 0, &i.map(k + 1));
                (k, m)
            })
            .collect();
        let to_cone = ChainMap::new(&a1, &cr.complex, maps)?;
        steps.push(step(format!("A_{a}[1] → cone(B_{a} → B_{})", a - 1), &to_cone)?);

        let g = &cr.from_target;
        let cg = cone(g).complex.shift(-1);
        let b = &b_a.complex;
        let maps = cg
            .degrees()
            .map(|k| {
                let u = b_prev.complex.rank(k);
                let mut m = Mat::zeros(coef, cg.rank(k), b.rank(k));
                if b.rank(k) > 0 {
                    m.paste(u, 0, &Mat::identity(coef, b.rank(k)));
                }
                (k, m)
            })
            .collect();
        let proj = ChainMap::new(&cg, b, maps)?;
        steps.push(step(format!("cone(B_{} → cone)[-1] → B_{a}", a - 1), &proj)?);

        let (t, to_t) = truncate_above(ac, a)?;
        steps.push(step(format!("A_{a} → τ≥{a} A_{a}"), &to_t)?);
        let hs = &cell.h[a as usize];
        let hc = Complex::concentrated(hs.module().clone(), a);
        let from_h = ChainMap::new(&hc, &t, vec![(a, hs.lift_matrix())])?;
        steps.push(step(format!("H^{a}(X_{a}, X_{})[-{a}] → τ≥{a} A_{a}", a - 1), &from_h)?);
    }
    let cmp = comparison(f, &cell)?;
    steps.push(step(format!("W ↪ B_{n}"), &cmp.incl)?);
    steps.push(step("W → D".to_string(), &cmp.phi)?);
    Ok(ReductionWitness {
        steps,
        terminal: cmp.phi.target().clone(),
        comparison: cmp,
    })
}

/// Outcome of comparing `D(X) → D(V)` with restriction on cohomology.
#[derive(Clone, Debug)]
pub struct RestrictionReport {
    pub map: ChainMap,
    /// `(k, square commutes)`.
    pub squares: Vec<(i64, bool)>,
}

impl RestrictionReport {
    pub fn commutes(&self) -> bool {
        self.squares.iter().all(|s| s.1)
    }
}

/// Chain map `D(X) → D(V)` induced by restricting relative cochains along
/// `(V_i, V_{i-1}) ⊆ (X_i, X_{i-1})`.
pub fn induced_cellular_map(f: &WCSheaf, dx: &Cellular, dv: &Cellular) -> Result<ChainMap> {
    let n = dx.filt.n().max(dv.filt.n()) as i64;
    let mut maps = Vec::new();
    for i in 0..=n {
        if i > dx.filt.n() as i64 || i > dv.filt.n() as i64 {
            continue;
        }
        let (x, v) = (&dx.rel[i as usize], &dv.rel[i as usize]);
        let r = pair_map(f, x, v)?;
        let m = dx.h[i as usize].induced(&dv.h[i as usize], &r.map(i))?;
        maps.push((i, m.matrix().clone()));
    }
    ChainMap::new(&dx.d, &dv.d, maps)
}

pub fn restriction_compat(f: &WCSheaf, filt: &Filtration, v: PointSet, filt_v: &Filtration) -> Result<RestrictionReport> {
    let space = f.space();
    if !space.is_open(v) {
        return Err(Error::NotOpen(space.describe(v)));
    }
    if filt_v.top() != v || filt.top() != space.all() {
        return Err(Error::InvalidFiltration("filtrations must cover X and V".into()));
    }
    let n = filt.n().max(filt_v.n()) as i64;
    for i in 0..=n {
        if !filt_v.level(i).is_subset(filt.level(i)) {
            return Err(Error::ContainmentViolated(format!(
                "V_{i} = {} ⊄ X_{i} = {}",
                space.describe(filt_v.level(i)),
                space.describe(filt.level(i))
            )));
        }
    }
    let dx = cellular_complex(f, &filt.padded(n as usize + 1))?;
    let dv = cellular_complex(f, &filt_v.padded(n as usize + 1))?;
    let map = induced_cellular_map(f, &dx, &dv)?;
    let cx = comparison(f, &dx)?;
    let cv = comparison(f, &dv)?;
    let res = pair_map(f, &cx.nerve, &cv.nerve)?;
    let mut squares = Vec::new();
    for k in 0..=n {
        let left = cx.psi(k)?.then(&res.on_cohomology(k))?;
        let right = map.on_cohomology(k).then(&cv.psi(k)?)?;
        squares.push((k, left.equals(&right)));
    }
    Ok(RestrictionReport { map, squares })
}
