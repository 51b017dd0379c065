//! Finite groups acting on presented modules and complexes: bar complexes,
//! the Hochschild–Serre double complex, and the edge-and-lift classes `cl^j`.

use crate::complex::{total, Complex, DoubleComplex};
use crate::error::{Error, Result};
use crate::linalg::{howell_form, kernel, vecops, Coef, FinMod, Mat, ModMap, Solver, Subquotient};

/// A group given by its multiplication table; element 0 need not be the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    name: String,
}

impl FinGroup {
    pub const MAX_ORDER: usize = 64;

    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        Self::named(table, "G")
    }

    pub fn named(table: Vec<Vec<usize>>, name: &str) -> Result<Self> {
        let n = table.len();
        if n == 0 || n > Self::MAX_ORDER {
            return Err(Error::InvalidGroup(format!("order {n} outside 1..=64")));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table is not an n×n table of elements".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))?;
        let mut inverse = vec![0; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                    }
                }
            }
        }
        Ok(FinGroup {
            table,
            identity,
            inverse,
            name: name.to_string(),
        })
    }

    pub fn trivial() -> Self {
        Self::named(vec![vec![0]], "1").unwrap()
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::named(table, &format!("Z/{n}")).unwrap()
    }

    /// `Z/2 × Z/2` with elements encoded as two bits.
    pub fn klein() -> Self {
        let table = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Self::named(table, "Z/2×Z/2").unwrap()
    }

    /// All groups of order at most 4, up to isomorphism.
    pub fn small_groups() -> Vec<FinGroup> {
        vec![Self::trivial(), Self::cyclic(2), Self::cyclic(3), Self::cyclic(4), Self::klein()]
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

/// A character `χ: G → (Z/l^m)^×` and an exponent `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twist {
    pub chi: Vec<u64>,
    pub a: i64,
}

impl Twist {
    pub fn new(g: &FinGroup, coef: Coef, chi: Vec<u64>, a: i64) -> Result<Self> {
        if chi.len() != g.order() {
            return Err(Error::InvalidAction(format!("character has {} values", chi.len())));
        }
        let chi: Vec<u64> = chi.iter().map(|&x| x % coef.modulus()).collect();
        for x in 0..g.order() {
            if !coef.is_unit(chi[x]) {
                return Err(Error::InvalidAction(format!("χ({x}) is not a unit")));
            }
            for y in 0..g.order() {
                if chi[g.mul(x, y)] != coef.mul(chi[x], chi[y]) {
                    return Err(Error::InvalidAction(format!("χ is not multiplicative at ({x}, {y})")));
                }
            }
        }
        Ok(Twist { chi, a })
    }

    /// `χ(g)^a`.
    pub fn factor(&self, coef: Coef, g: usize) -> u64 {
        coef.unit_pow(self.chi[g], self.a).expect("character values are units")
    }
}

/// A module with a left `G`-action `x ↦ x·A_g` (rows), so `A_{gh} = A_h A_g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    group: FinGroup,
    module: FinMod,
    action: Vec<Mat>,
}

fn equal_in(m: &FinMod, a: &Mat, b: &Mat) -> bool {
    a.sub(b).row_iter().all(|r| m.is_zero_elem(r))
}

impl GModule {
    pub fn new(group: &FinGroup, module: FinMod, action: Vec<Mat>) -> Result<Self> {
        let n = group.order();
        if action.len() != n {
            return Err(Error::InvalidAction(format!("{} action matrices for a group of order {n}", action.len())));
        }
        let r = module.rank();
        for (g, a) in action.iter().enumerate() {
            if a.rows() != r || a.cols() != r {
                return Err(Error::InvalidAction(format!("action of {g} has the wrong shape")));
            }
            ModMap::new(module.clone(), module.clone(), a.clone())
                .map_err(|_| Error::InvalidAction(format!("action of {g} is not well defined")))?;
        }
        let coef = module.coef();
        if !equal_in(&module, &action[group.identity()], &Mat::identity(coef, r)) {
            return Err(Error::InvalidAction("identity does not act trivially".into()));
        }
        for g in 0..n {
            for h in 0..n {
                if !equal_in(&module, &action[group.mul(g, h)], &action[h].mul(&action[g])) {
                    return Err(Error::InvalidAction(format!("action of {g}·{h} is not the composite")));
                }
            }
        }
        Ok(GModule {
            group: group.clone(),
            module,
            action,
        })
    }

    pub fn trivial(group: &FinGroup, module: FinMod) -> Self {
        let id = Mat::identity(module.coef(), module.rank());
        GModule {
            group: group.clone(),
            action: vec![id; group.order()],
            module,
        }
    }

    /// `R[G]` with `g·e_h = e_{gh}`.
    pub fn regular(group: &FinGroup, coef: Coef) -> Self {
        let n = group.order();
        let action = (0..n)
            .map(|g| {
                let mut a = Mat::zeros(coef, n, n);
                for h in 0..n {
                    a.set(h, group.mul(g, h), 1);
                }
                a
            })
            .collect();
        GModule::new(group, FinMod::free(coef, n), action).expect("regular representation")
    }

    pub fn group(&self) -> &FinGroup {
        &self.group
    }

    pub fn module(&self) -> &FinMod {
        &self.module
    }

    pub fn coef(&self) -> Coef {
        self.module.coef()
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn action(&self, g: usize) -> &Mat {
        &self.action[g]
    }

    pub fn actions(&self) -> &[Mat] {
        &self.action
    }

    /// Multiplies the action of `g` by `χ(g)^a`.
    pub fn twist(&self, t: &Twist) -> GModule {
        let coef = self.coef();
        let action = self
            .action
            .iter()
            .enumerate()
            .map(|(g, a)| a.scale(t.factor(coef, g) as i64))
            .collect();
        GModule {
            group: self.group.clone(),
            module: self.module.clone(),
            action,
        }
    }

    pub fn reduce_to(&self, coef: Coef) -> GModule {
        GModule {
            group: self.group.clone(),
            module: self.module.reduce_to(coef),
            action: self.action.iter().map(|a| a.reduce_to(coef)).collect(),
        }
    }

    pub fn direct_sum(parts: &[GModule]) -> GModule {
        let g = &parts[0].group;
        let coef = parts[0].coef();
        let module = FinMod::direct_sum(coef, &parts.iter().map(|p| p.module.clone()).collect::<Vec<_>>());
        let action = (0..g.order())
            .map(|x| Mat::block_diag(coef, &parts.iter().map(|p| &p.action[x]).collect::<Vec<_>>()))
            .collect();
        GModule {
            group: g.clone(),
            module,
            action,
        }
    }

    /// Checks `f(g·x) = g·f(x)`.
    pub fn is_equivariant(&self, target: &GModule, f: &Mat) -> bool {
        (0..self.group.order()).all(|g| equal_in(&target.module, &self.action[g].mul(f), &f.mul(&target.action[g])))
    }

    /// The action induced on a subquotient stable under `G`.
    pub fn on_subquotient(&self, sq: &Subquotient) -> Result<GModule> {
        let action = self
            .action
            .iter()
            .map(|a| sq.induced(sq, a).map(|m| m.matrix().clone()))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::NotEquivariant("subquotient is not G-stable".into()))?;
        GModule::new(&self.group, sq.module().clone(), action)
    }
}

/// Rows of the returned matrix are the flattened (row-major) matrices `F` of
/// equivariant, well-defined maps `M → N` that kill the rows of `kill`.
pub fn equivariant_hom_basis(m: &GModule, n: &GModule, kill: Option<&Mat>) -> Mat {
    let coef = m.coef();
    let (r, s) = (m.rank(), n.rank());
    let rn = n.module().relations();
    let t = rn.rows();
    let ng = m.group().order();
    let rm = m.module().relations();
    let empty = Mat::zeros(coef, 0, r);
    let k = kill.unwrap_or(&empty);
    // Conditions: one block of r×s per group element, one for R_M, one for kill rows.
    let blocks = ng * r + rm.rows() + k.rows();
    let slack = blocks * t;
    let unknowns = r * s + slack;
    let mut l = Mat::zeros(coef, unknowns, blocks * s);
    let neg = |x: u64| coef.neg(x);
    for g in 0..ng {
        let (ag, bg) = (m.action(g), n.action(g));
        for a in 0..r {
            let row_block = g * r + a;
            for b in 0..s {
                let col = row_block * s + b;
                // (A_g F)[a][b] = Σ_i A_g[a][i] F[i][b]
                for i in 0..r {
                    let u = i * s + b;
                    l.set(u, col, coef.add(l.get(u, col), ag.get(a, i)));
                }
                // −(F B_g)[a][b] = −Σ_k F[a][k] B_g[k][b]
                for kk in 0..s {
                    let u = a * s + kk;
                    l.set(u, col, coef.add(l.get(u, col), neg(bg.get(kk, b))));
                }
            }
        }
    }
    let extra: Vec<&[u64]> = rm.row_iter().chain(k.row_iter()).collect();
    for (e, row) in extra.iter().enumerate() {
        let row_block = ng * r + e;
        for b in 0..s {
            let col = row_block * s + b;
            for i in 0..r {
                let u = i * s + b;
                l.set(u, col, coef.add(l.get(u, col), row[i]));
            }
        }
    }
    for row_block in 0..blocks {
        for c in 0..t {
            let u = r * s + row_block * t + c;
            for b in 0..s {
                let col = row_block * s + b;
                l.set(u, col, neg(rn.get(c, b)));
            }
        }
    }
    let ker = kernel(&l);
    let sols = ker.select_cols(&(0..r * s).collect::<Vec<_>>());
    howell_form(&sols)
}

/// A complex of `G`-modules with equivariant differentials.
#[derive(Clone, Debug)]
pub struct GComplex {
    group: FinGroup,
    complex: Complex,
    actions: Vec<Vec<Mat>>,
}

impl GComplex {
    /// `actions[k - lo][g]` acts on `complex^k`.
    pub fn new(group: &FinGroup, complex: Complex, actions: Vec<Vec<Mat>>) -> Result<Self> {
        let degs: Vec<i64> = complex.degrees().collect();
        if actions.len() != degs.len() {
            return Err(Error::InvalidAction("one action per degree is required".into()));
        }
        let mut mods = Vec::new();
        for (i, &k) in degs.iter().enumerate() {
            mods.push(GModule::new(group, complex.module(k), actions[i].clone())?);
        }
        for (i, &k) in degs.iter().enumerate().take(degs.len().saturating_sub(1)) {
            if !mods[i].is_equivariant(&mods[i + 1], &complex.diff(k)) {
                return Err(Error::NotEquivariant(format!("differential in degree {k}")));
            }
        }
        Ok(GComplex {
            group: group.clone(),
            complex,
            actions,
        })
    }

    /// Every component with the trivial action.
    pub fn trivial(group: &FinGroup, complex: Complex) -> Self {
        let actions = complex
            .degrees()
            .map(|k| vec![Mat::identity(complex.coef(), complex.rank(k)); group.order()])
            .collect();
        GComplex {
            group: group.clone(),
            complex,
            actions,
        }
    }

    pub fn from_modules(group: &FinGroup, lo: i64, mods: &[GModule], diffs: Vec<Mat>) -> Result<Self> {
        let coef = mods
            .first()
            .map(GModule::coef)
            .ok_or_else(|| Error::DimensionMismatch("empty complex".into()))?;
        let c = Complex::new(coef, lo, mods.iter().map(|m| m.module().clone()).collect(), diffs)?;
        Self::new(group, c, mods.iter().map(|m| m.actions().to_vec()).collect())
    }

    pub fn group(&self) -> &FinGroup {
        &self.group
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn coef(&self) -> Coef {
        self.complex.coef()
    }

    pub fn gmodule(&self, k: i64) -> GModule {
        let c = &self.complex;
        if k < c.lo() || k > c.hi() {
            return GModule::trivial(&self.group, FinMod::zero(c.coef()));
        }
        GModule {
            group: self.group.clone(),
            module: c.module(k),
            action: self.actions[(k - c.lo()) as usize].clone(),
        }
    }

    /// `H^k` with the induced action.
    pub fn cohomology_gmodule(&self, k: i64) -> Result<(Subquotient, GModule)> {
        let sq = self.complex.cohomology_sq(k);
        let gm = self.gmodule(k).on_subquotient(&sq)?;
        Ok((sq, gm))
    }

    pub fn reduce_to(&self, coef: Coef) -> GComplex {
        GComplex {
            group: self.group.clone(),
            complex: self.complex.reduce_to(coef),
            actions: self
                .actions
                .iter()
                .map(|v| v.iter().map(|a| a.reduce_to(coef)).collect())
                .collect(),
        }
    }

    pub fn twist(&self, t: &Twist) -> GComplex {
        let coef = self.coef();
        GComplex {
            group: self.group.clone(),
            complex: self.complex.clone(),
            actions: self
                .actions
                .iter()
                .map(|v| v.iter().enumerate().map(|(g, a)| a.scale(t.factor(coef, g) as i64)).collect())
                .collect(),
        }
    }
}

/// Index of the tuple `(g_1, …, g_p)` among `G^p` (first entry most significant).
fn tuple_index(n: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &g| acc * n + g)
}

fn tuple_of(n: usize, p: usize, mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; p];
    for i in (0..p).rev() {
        t[i] = idx % n;
        idx /= n;
    }
    t
}

/// `C^p(G, M) = M^{G^p}`.
pub fn bar_module(m: &GModule, p: usize) -> FinMod {
    let count = m.group().order().pow(p as u32);
    FinMod::direct_sum(m.coef(), &vec![m.module().clone(); count])
}

/// Inhomogeneous bar differential `C^p(G, M) → C^{p+1}(G, M)`:
/// `(df)(g_1..g_{p+1}) = g_1·f(g_2..) + Σ (-1)^i f(..g_i g_{i+1}..) + (-1)^{p+1} f(g_1..g_p)`.
pub fn bar_differential(m: &GModule, p: usize) -> Mat {
    let g = m.group();
    let n = g.order();
    let coef = m.coef();
    let r = m.rank();
    let src = n.pow(p as u32);
    let dst = n.pow(p as u32 + 1);
    let mut d = Mat::zeros(coef, src * r, dst * r);
    let add_block = |d: &mut Mat, si: usize, ti: usize, b: &Mat| {
        let cur = d.block(si * r, ti * r, r, r);
        d.paste(si * r, ti * r, &cur.add(b));
    };
    let id = Mat::identity(coef, r);
    let neg_id = id.neg();
    for ti in 0..dst {
        let t = tuple_of(n, p + 1, ti);
        add_block(&mut d, tuple_index(n, &t[1..]), ti, m.action(t[0]));
        for i in 1..=p {
            let mut s = t[..i - 1].to_vec();
            s.push(g.mul(t[i - 1], t[i]));
            s.extend_from_slice(&t[i + 1..]);
            add_block(&mut d, tuple_index(n, &s), ti, if i % 2 == 0 { &id } else { &neg_id });
        }
        add_block(&mut d, tuple_index(n, &t[..p]), ti, if (p + 1).is_multiple_of(2) { &id } else { &neg_id });
    }
    d
}

/// The bar complex in degrees `0..=p_max`.
pub fn bar_complex(m: &GModule, p_max: usize) -> Complex {
    let mods = (0..=p_max).map(|p| bar_module(m, p)).collect();
    let diffs = (0..p_max).map(|p| bar_differential(m, p)).collect();
    Complex::new(m.coef(), 0, mods, diffs).expect("bar complex")
}

pub fn group_cohomology(m: &GModule, p: usize) -> FinMod {
    bar_complex(m, p + 1).cohomology(p as i64)
}

/// `(p, q) ↦ C^p(G, K^q)` for `0 ≤ p ≤ p_max`, bar differential horizontally
/// and `K`'s differential vertically.
pub fn hs_double(k: &GComplex, p_max: usize) -> Result<DoubleComplex> {
    let c = k.complex();
    let coef = c.coef();
    let g = k.group();
    let qs: Vec<i64> = c.degrees().collect();
    let mut entries = Vec::new();
    let mut dh = Vec::new();
    let mut dv = Vec::new();
    for p in 0..=p_max {
        entries.push(qs.iter().map(|&q| bar_module(&k.gmodule(q), p)).collect::<Vec<_>>());
        if p < p_max {
            dh.push(qs.iter().map(|&q| bar_differential(&k.gmodule(q), p)).collect::<Vec<_>>());
        }
        let copies = g.order().pow(p as u32);
        dv.push(
            qs.iter()
                .take(qs.len().saturating_sub(1))
                .map(|&q| {
                    let d = c.diff(q);
                    Mat::block_diag(coef, &vec![&d; copies])
                })
                .collect::<Vec<_>>(),
        );
    }
    DoubleComplex::new(coef, 0, c.lo(), entries, dh, dv)
}

/// Columns needed so that the total complex is exact up to degree `n`.
pub fn hs_columns(k: &GComplex, n: i64) -> usize {
    (n + 1 - k.complex().lo()).max(0) as usize
}

/// `H^n_G(K)` computed from the truncated double complex.
pub fn equivariant_cohomology(k: &GComplex, n: i64) -> Result<FinMod> {
    let d = hs_double(k, hs_columns(k, n))?;
    Ok(total(&d).cohomology(n))
}

/// A class `cl^j` as a coset `value + indeterminacy` in `H^j(G, H^{n-j}(K))`.
#[derive(Clone, Debug)]
pub struct ClValue {
    pub j: usize,
    pub target: FinMod,
    pub value: Vec<u64>,
    /// Rows generating the indeterminacy subgroup.
    pub indeterminacy: Mat,
    pub defined: bool,
}

impl ClValue {
    pub fn is_zero(&self) -> bool {
        self.coset_contains(&vec![0; self.value.len()])
    }

    /// Is `v` in the same coset as `value`?
    pub fn coset_contains(&self, v: &[u64]) -> bool {
        let coef = self.target.coef();
        let diff = vecops::sub(coef, &self.value, v);
        let span = Mat::vstack(coef, self.target.rank(), &[&self.indeterminacy, self.target.relations()]);
        Solver::new(&span).contains(&diff)
    }
}

#[derive(Clone, Debug)]
pub struct ClReport {
    pub n: i64,
    pub classes: Vec<ClValue>,
}

/// Data for the class computations of one `(G, K, n)`.
pub struct ClContext {
    pub k: GComplex,
    pub n: i64,
    pub double: DoubleComplex,
    pub tot: Complex,
}

impl ClContext {
    pub fn new(k: &GComplex, n: i64) -> Result<Self> {
        let double = hs_double(k, hs_columns(k, n).max(3))?;
        let tot = total(&double);
        Ok(ClContext {
            k: k.clone(),
            n,
            double,
            tot,
        })
    }

    /// Offset and rank of the `(p, deg - p)` block of `Tot^deg`.
    pub fn block(&self, deg: i64, p: i64) -> Option<(usize, usize)> {
        self.double
            .total_layout(deg)
            .into_iter()
            .find(|&(pp, _, _)| pp == p)
            .map(|(pp, q, off)| (off, self.double.rank(pp, q)))
    }

    pub fn component(&self, z: &[u64], deg: i64, p: i64) -> Vec<u64> {
        self.block(deg, p).map_or(vec![], |(o, r)| z[o..o + r].to_vec())
    }

    /// A vector of `Tot^deg` with one block filled in.
    pub fn embed(&self, deg: i64, p: i64, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.tot.rank(deg)];
        if let Some((o, r)) = self.block(deg, p) {
            out[o..o + r].copy_from_slice(&v[..r]);
        }
        out
    }

    fn d(&self, deg: i64, w: &[u64]) -> Vec<u64> {
        self.tot.diff(deg).apply(w)
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let coef = self.k.coef();
        a.iter().zip(b).map(|(&x, &y)| coef.sub(x, y)).collect()
    }

    /// Bar complex of `H^q(K)` together with the subquotient presenting it.
    fn coeff_bar(&self, q: i64, p_max: usize) -> Result<(Subquotient, GModule, Complex)> {
        let (sq, gm) = self.k.cohomology_gmodule(q)?;
        let bar = bar_complex(&gm, p_max);
        Ok((sq, gm, bar))
    }

    /// Maps a `C^p(G, Z^q(K))` cochain to `C^p(G, H^q(K))`.
    fn to_coeff_cochain(&self, sq: &Subquotient, v: &[u64]) -> Result<Vec<u64>> {
        let r = sq.ambient().rank();
        let mut out = Vec::new();
        for chunk in v.chunks(r.max(1)) {
            if r == 0 {
                break;
            }
            out.extend(sq.reduce(chunk).map_err(|_| Error::NotACocycle("value is not a cocycle of K".into()))?);
        }
        Ok(out)
    }

    /// Class of a `C^p(G, Z^{n-p}(K))` cochain in `H^p(G, H^{n-p}(K))`.
    fn class_in(&self, p: usize, v: &[u64]) -> Result<(FinMod, Vec<u64>)> {
        let q = self.n - p as i64;
        let (sq, _, bar) = self.coeff_bar(q, p + 1)?;
        let c = if sq.ambient().rank() == 0 || v.is_empty() {
            vec![0; bar.rank(p as i64)]
        } else {
            self.to_coeff_cochain(&sq, v)?
        };
        let h = bar.cohomology_sq(p as i64);
        let val = h.reduce(&c).map_err(|_| Error::NotACocycle(format!("component {p} is not a cocycle")))?;
        Ok((h.module().clone(), val))
    }

    /// With `z_0 = 0`, subtracts `D(lift h)` and then `D(y)` for `y` in the
    /// `(1, n-2)` block so that `z_1` vanishes as well.
    fn kill_first(&self, z: &[u64], h: &[u64], sq: &Subquotient) -> Result<Vec<u64>> {
        let n = self.n;
        let coef = self.k.coef();
        let mut z = z.to_vec();
        let lift = sq.lift(h);
        if !lift.is_empty() {
            let w = self.embed(n - 1, 0, &lift);
            z = self.sub(&z, &self.d(n - 1, &w));
        }
        let z1 = self.component(&z, n, 1);
        if z1.is_empty() {
            return Ok(z);
        }
        // (D y)_{(1, n-1)} = -d_v y, so solve d_v y = -z_1 value by value.
        let q = n - 1;
        let c = self.k.complex();
        let m_prev = c.module(q - 1);
        let m_here = c.module(q);
        let solver = Solver::new(&Mat::vstack(coef, m_here.rank(), &[&c.diff(q - 1), m_here.relations()]));
        let r = m_here.rank();
        let mut y = Vec::new();
        for chunk in z1.chunks(r.max(1)) {
            let target: Vec<u64> = chunk.iter().map(|&x| coef.neg(x)).collect();
            let sol = solver
                .solve(&target)
                .ok_or_else(|| Error::PreconditionFailed("cl^1 is not zero".into()))?;
            y.extend_from_slice(&sol[..m_prev.rank()]);
        }
        if !y.is_empty() {
            let w = self.embed(n - 1, 1, &y);
            z = self.sub(&z, &self.d(n - 1, &w));
        }
        Ok(z)
    }
}

impl ClContext {
    fn cl2_value(&self, z1: &[u64], h: &[u64], sq1: &Subquotient) -> Result<Vec<u64>> {
        let z2 = self.kill_first(z1, h, sq1)?;
        Ok(self.class_in(2, &self.component(&z2, self.n, 2))?.1)
    }

    /// Generators of `H^0(G, H^{n-1}(K))`, as rows in the coordinates of `H^{n-1}(K)`.
    pub fn invariant_splittings(&self) -> Result<Mat> {
        let (_, gm, bar) = self.coeff_bar(self.n - 1, 1)?;
        let inv = bar.cohomology_sq(0);
        Ok(howell_form(&Mat::vstack(gm.coef(), gm.rank(), &[&inv.lift_matrix()])))
    }

    /// Pushes a class of `H^j(G, H^{n-j}(K))` along the coefficient reduction
    /// to the level of `lower`, which must be this context reduced.
    pub fn reduce_class(&self, j: usize, value: &[u64], lower: &ClContext) -> Result<Vec<u64>> {
        let q = self.n - j as i64;
        let lc = lower.k.coef();
        let (sq, _, bar) = self.coeff_bar(q, j + 1)?;
        let (sq_lo, _, bar_lo) = lower.coeff_bar(q, j + 1)?;
        let h = bar.cohomology_sq(j as i64);
        let h_lo = bar_lo.cohomology_sq(j as i64);
        let cochain = h.lift(value);
        let r = sq.module().rank();
        let mut out = Vec::new();
        for chunk in cochain.chunks(r.max(1)) {
            if r == 0 {
                break;
            }
            let amb: Vec<u64> = sq.lift(chunk).iter().map(|&x| x % lc.modulus()).collect();
            out.extend(sq_lo.reduce(&amb).map_err(|_| Error::NotACocycle("reduced value is not a cocycle".into()))?);
        }
        if out.is_empty() {
            out = vec![0; bar_lo.rank(j as i64)];
        }
        h_lo.reduce(&out).map_err(|_| Error::NotACocycle("reduced cochain is not a cocycle".into()))
    }

    /// `d_2: H^0(G, H^{n-1}(K)) → H^2(G, H^{n-2}(K))` on an invariant class.
    pub fn d2(&self, c: &[u64]) -> Result<Vec<u64>> {
        let (sq1, _, _) = self.coeff_bar(self.n - 1, 1)?;
        let zero = vec![0; self.tot.rank(self.n)];
        self.cl2_value(&zero, c, &sq1)
    }
}

/// `cl^0`, `cl^1`, `cl^2` of a total cocycle `z ∈ Tot^n` of the
/// Hochschild–Serre double complex built by [`ClContext::new`].
pub fn cl_classes(ctx: &ClContext, z: &[u64]) -> Result<ClReport> {
    let n = ctx.n;
    let coef = ctx.k.coef();
    if z.len() != ctx.tot.rank(n) {
        return Err(Error::DimensionMismatch(format!("cocycle has length {}", z.len())));
    }
    let dz = ctx.d(n, z);
    if !ctx.tot.module(n + 1).is_zero_elem(&dz) {
        return Err(Error::NotACocycle(format!("D z ≠ 0 in degree {}", n + 1)));
    }
    let mut classes = Vec::new();

    // cl^0: the class of z_0 in H^0(G, H^n(K)).
    let (t0, v0) = ctx.class_in(0, &ctx.component(z, n, 0))?;
    let zero_rows = |t: &FinMod| Mat::zeros(coef, 0, t.rank());
    let c0 = ClValue {
        j: 0,
        indeterminacy: zero_rows(&t0),
        target: t0,
        value: v0,
        defined: true,
    };
    let ok0 = c0.is_zero();
    classes.push(c0);

    // cl^1: kill z_0 by a coboundary of K, read z_1 in H^1(G, H^{n-1}(K)).
    let (sq1, _, bar1) = ctx.coeff_bar(n - 1, 2)?;
    let mut z1 = z.to_vec();
    if ok0 {
        let z0 = ctx.component(z, n, 0);
        if !z0.is_empty() {
            let c = ctx.k.complex();
            let solver = Solver::new(&Mat::vstack(coef, c.rank(n), &[&c.diff(n - 1), c.module(n).relations()]));
            let y = solver
                .solve(&z0)
                .ok_or_else(|| Error::NotACocycle("z_0 is not a coboundary although cl^0 = 0".into()))?;
            let w = ctx.embed(n - 1, 0, &y[..c.rank(n - 1)]);
            z1 = ctx.sub(z, &ctx.d(n - 1, &w));
        }
    }
    let (t1, v1) = if ok0 {
        ctx.class_in(1, &ctx.component(&z1, n, 1))?
    } else {
        (bar1.cohomology(1), vec![0; bar1.cohomology(1).rank()])
    };
    let c1 = ClValue {
        j: 1,
        indeterminacy: zero_rows(&t1),
        target: t1,
        value: v1,
        defined: ok0,
    };
    let ok1 = ok0 && c1.is_zero();
    classes.push(c1);

    // cl^2: write [z_1] = d h, subtract, and read z_2 in H^2(G, H^{n-2}(K)).
    let (_, _, bar2) = ctx.coeff_bar(n - 2, 3)?;
    let t2 = bar2.cohomology(2);
    if !ok1 {
        classes.push(ClValue {
            j: 2,
            indeterminacy: zero_rows(&t2),
            value: vec![0; t2.rank()],
            target: t2,
            defined: false,
        });
        return Ok(ClReport { n, classes });
    }
    let comp1 = ctx.component(&z1, n, 1);
    let coeff1 = if sq1.ambient().rank() == 0 || comp1.is_empty() {
        vec![0; bar1.rank(1)]
    } else {
        ctx.to_coeff_cochain(&sq1, &comp1)?
    };
    let b1 = bar1.module(1);
    let solver = Solver::new(&Mat::vstack(coef, b1.rank(), &[&bar1.diff(0), b1.relations()]));
    let h = solver
        .solve(&coeff1)
        .ok_or_else(|| Error::NotACocycle("z_1 is not a bar coboundary although cl^1 = 0".into()))?;
    let h: Vec<u64> = h[..bar1.rank(0)].to_vec();
    let v2 = ctx.cl2_value(&z1, &h, &sq1)?;
    // Changing h by an invariant class moves cl^2 by its d_2-image.
    let mut ind = Vec::new();
    for c in ctx.invariant_splittings()?.row_iter() {
        ind.push(ctx.d2(c)?);
    }
    let indeterminacy = howell_form(&Mat::from_residue_rows(coef, t2.rank(), ind));
    classes.push(ClValue {
        j: 2,
        target: t2,
        value: v2,
        indeterminacy,
        defined: true,
    });
    Ok(ClReport { n, classes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(l: u64, m: u32) -> Coef {
        Coef::new(l, m).unwrap()
    }

    #[test]
    fn group_axioms() {
        assert!(FinGroup::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert_eq!(FinGroup::cyclic(3).inv(1), 2);
        assert_eq!(FinGroup::klein().order(), 4);
    }

    #[test]
    fn cohomology_of_cyclic_groups() {
        let g = FinGroup::cyclic(2);
        let m = GModule::trivial(&g, FinMod::free(c(2, 1), 1));
        for p in 0..=2 {
            assert_eq!(group_cohomology(&m, p).invariant_factors(), vec![1], "p = {p}");
        }
        assert_eq!(bar_module(&m, 2).rank(), 4);
        let m = GModule::trivial(&g, FinMod::free(c(3, 1), 1));
        assert_eq!(group_cohomology(&m, 0).invariant_factors(), vec![1]);
        assert!(group_cohomology(&m, 1).is_zero());
        assert!(group_cohomology(&m, 2).is_zero());
        let t = GModule::trivial(&FinGroup::trivial(), FinMod::free(c(2, 2), 2));
        assert_eq!(group_cohomology(&t, 0).invariant_factors(), vec![2, 2]);
        assert!(group_cohomology(&t, 1).is_zero());
    }

    #[test]
    fn twists() {
        let g = FinGroup::cyclic(2);
        let k = c(2, 2);
        let t = Twist::new(&g, k, vec![1, 3], 1).unwrap();
        let m = GModule::trivial(&g, FinMod::free(k, 1)).twist(&t);
        assert_eq!(m.action(1).get(0, 0), 3);
        assert_eq!(group_cohomology(&m, 0).invariant_factors(), vec![1]);
        let back = m.twist(&Twist { chi: t.chi.clone(), a: -1 });
        assert_eq!(back, GModule::trivial(&g, FinMod::free(k, 1)));
        assert_eq!(m.twist(&Twist { chi: t.chi.clone(), a: 0 }), m);
        assert!(Twist::new(&g, k, vec![1, 2], 1).is_err());
    }

    #[test]
    fn action_checks() {
        let g = FinGroup::cyclic(2);
        let k = c(2, 1);
        let bad = GModule::new(&g, FinMod::free(k, 1), vec![Mat::identity(k, 1), Mat::zeros(k, 1, 1)]);
        assert!(matches!(bad, Err(Error::InvalidAction(_))));
        let reg = GModule::regular(&g, k);
        assert_eq!(group_cohomology(&reg, 0).invariant_factors(), vec![1]);
        assert!(group_cohomology(&reg, 1).is_zero());
    }

    #[test]
    fn hs_examples() {
        let k = c(2, 2);
        let g = FinGroup::cyclic(2);
        let times_two = Complex::new(k, 0, vec![FinMod::free(k, 1); 2], vec![Mat::scalar(k, 1, 2)]).unwrap();
        let kc = GComplex::trivial(&g, times_two.clone());
        assert_eq!(equivariant_cohomology(&kc, 0).unwrap().invariant_factors(), vec![1]);
        let kt = GComplex::trivial(&FinGroup::trivial(), times_two.clone());
        for n in 0..=2 {
            assert_eq!(equivariant_cohomology(&kt, n).unwrap(), times_two.cohomology(n).clone().reduce_to(k));
        }
        let m = GModule::trivial(&g, FinMod::free(k, 1));
        let k0 = GComplex::from_modules(&g, 0, std::slice::from_ref(&m), vec![]).unwrap();
        for n in 0..=2 {
            assert!(equivariant_cohomology(&k0, n).unwrap().is_isomorphic(&group_cohomology(&m, n as usize)));
        }
    }

    #[test]
    fn equivariant_maps() {
        let g = FinGroup::cyclic(2);
        let k = c(2, 1);
        let reg = GModule::regular(&g, k);
        let triv = GModule::trivial(&g, FinMod::free(k, 1));
        // Hom_G(R[G], R) ≅ R via the augmentation.
        let b = equivariant_hom_basis(&reg, &triv, None);
        assert_eq!(b.rows(), 1);
        assert_eq!(b.row(0), &[1, 1]);
    }

    #[test]
    fn cl_for_a_module_in_degree_zero() {
        // K = M in degree 0 and z ∈ H^1: cl^0 vanishes and cl^1 is z itself.
        let k = c(2, 1);
        let g = FinGroup::cyclic(2);
        let m = GModule::trivial(&g, FinMod::free(k, 1));
        let kc = GComplex::from_modules(&g, 0, &[m], vec![]).unwrap();
        let ctx = ClContext::new(&kc, 1).unwrap();
        let mut z = vec![0; ctx.tot.rank(1)];
        let (o, _) = ctx.block(1, 1).unwrap();
        z[o + 1] = 1; // f(g) = 1 for the generator
        let r = cl_classes(&ctx, &z).unwrap();
        assert!(r.classes[0].is_zero());
        assert!(!r.classes[1].is_zero());
        assert!(r.classes[1].defined);
        assert!(!r.classes[2].defined);
    }

    #[test]
    fn cl2_of_a_group_class() {
        let k = c(2, 1);
        let g = FinGroup::cyclic(2);
        let m = GModule::trivial(&g, FinMod::free(k, 1));
        let kc = GComplex::from_modules(&g, 0, &[m], vec![]).unwrap();
        let ctx = ClContext::new(&kc, 2).unwrap();
        let mut z = vec![0; ctx.tot.rank(2)];
        let (o, _) = ctx.block(2, 2).unwrap();
        z[o + 3] = 1; // f(g, g) = 1
        let r = cl_classes(&ctx, &z).unwrap();
        assert!(r.classes[0].is_zero() && r.classes[1].is_zero());
        assert!(r.classes[2].defined);
        assert!(!r.classes[2].is_zero());
        // Cohomologous cocycles give the same coset.
        let w = ctx.embed(1, 1, &[1, 1]);
        let dw = ctx.tot.diff(1).apply(&w);
        let z2: Vec<u64> = z.iter().zip(&dw).map(|(&a, &b)| k.add(a, b)).collect();
        let r2 = cl_classes(&ctx, &z2).unwrap();
        assert!(r.classes[2].coset_contains(&r2.classes[2].value));
    }

    #[test]
    fn cl_with_trivial_group() {
        let k = c(3, 1);
        let g = FinGroup::trivial();
        let cx = Complex::new(k, 0, vec![FinMod::free(k, 1); 2], vec![Mat::zeros(k, 1, 1)]).unwrap();
        let kc = GComplex::trivial(&g, cx);
        let ctx = ClContext::new(&kc, 1).unwrap();
        let mut z = vec![0; ctx.tot.rank(1)];
        let (o, _) = ctx.block(1, 0).unwrap();
        z[o] = 1;
        let r = cl_classes(&ctx, &z).unwrap();
        assert_eq!(r.classes[0].value, vec![1]);
        assert!(r.classes[1].target.is_zero());
        assert!(r.classes[2].target.is_zero());
        let bad = vec![1; ctx.tot.rank(0)];
        let ctx0 = ClContext::new(&kc, 0).unwrap();
        assert!(cl_classes(&ctx0, &bad[..ctx0.tot.rank(0)]).is_ok());
    }
}
