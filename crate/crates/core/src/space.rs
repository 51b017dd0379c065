//! Finite topological spaces as posets (opens are up-closed), functor sheaves,
//! extension by zero and nerve cochain complexes.

use std::collections::HashMap;
use std::fmt;

use crate::complex::{check_ses, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::linalg::{Coef, FinMod, Mat, ModMap};

/// Subset of the points of a space with at most 64 points.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn single(x: usize) -> Self {
        PointSet(1 << x)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(pts: I) -> Self {
        PointSet(pts.into_iter().fold(0, |acc, x| acc | (1 << x)))
    }

    pub fn contains(self, x: usize) -> bool {
        self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1 << x;
    }

    pub fn union(self, o: PointSet) -> PointSet {
        PointSet(self.0 | o.0)
    }

    pub fn inter(self, o: PointSet) -> PointSet {
        PointSet(self.0 & o.0)
    }

    pub fn minus(self, o: PointSet) -> PointSet {
        PointSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: PointSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(x)
            }
        })
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite T0 space, stored as its specialization order.
#[derive(Clone, PartialEq, Eq)]
pub struct FinSpace {
    labels: Vec<String>,
    up: Vec<PointSet>,
    down: Vec<PointSet>,
    height: Vec<usize>,
}

impl fmt::Debug for FinSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinSpace{:?}", self.labels)
    }
}

impl FinSpace {
    /// `pairs` lists `(x, y)` with `x ≤ y`; reflexive pairs may be omitted but
    /// the relation must already be transitive and antisymmetric.
    pub fn new(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        if n > 64 {
            return Err(Error::InvalidOrder(format!("{n} points; at most 64 supported")));
        }
        let mut up = vec![PointSet::EMPTY; n];
        for (x, u) in up.iter_mut().enumerate() {
            u.insert(x);
        }
        for &(x, y) in pairs {
            if x >= n || y >= n {
                return Err(Error::InvalidOrder(format!("pair ({x}, {y}) out of range")));
            }
            up[x].insert(y);
        }
        for x in 0..n {
            for y in up[x].iter() {
                if x != y && up[y].contains(x) {
                    return Err(Error::InvalidOrder(format!(
                        "{} ≤ {} and {} ≤ {}",
                        labels[x], labels[y], labels[y], labels[x]
                    )));
                }
                for z in up[y].iter() {
                    if !up[x].contains(z) {
                        return Err(Error::InvalidOrder(format!(
                            "transitivity fails: {} ≤ {} ≤ {} but not {} ≤ {}",
                            labels[x], labels[y], labels[z], labels[x], labels[z]
                        )));
                    }
                }
            }
        }
        Ok(Self::from_up_sets(labels, up))
    }

    /// Order generated by `pairs` (transitive closure taken here).
    pub fn generated(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        if n > 64 {
            return Err(Error::InvalidOrder(format!("{n} points; at most 64 supported")));
        }
        let mut up: Vec<PointSet> = (0..n).map(PointSet::single).collect();
        for &(x, y) in pairs {
            if x >= n || y >= n {
                return Err(Error::InvalidOrder(format!("pair ({x}, {y}) out of range")));
            }
            up[x].insert(y);
        }
        loop {
            let mut changed = false;
            for x in 0..n {
                let mut u = up[x];
                for y in up[x].iter() {
                    u = u.union(up[y]);
                }
                if u != up[x] {
                    up[x] = u;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| up[x].iter().map(move |y| (x, y))).collect();
        Self::new(labels, &pairs)
    }

    fn from_up_sets(labels: Vec<String>, up: Vec<PointSet>) -> Self {
        let n = labels.len();
        let mut down = vec![PointSet::EMPTY; n];
        for x in 0..n {
            for y in up[x].iter() {
                down[y].insert(x);
            }
        }
        let mut height = vec![usize::MAX; n];
        // Heights by repeated relaxation over strictly smaller points.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| down[x].len());
        for &x in &order {
            height[x] = down[x]
                .iter()
                .filter(|&y| y != x)
                .map(|y| height[y] + 1)
                .max()
                .unwrap_or(0);
        }
        FinSpace {
            labels,
            up,
            down,
            height,
        }
    }

    /// Face poset of the simplicial complex generated by `simplices`
    /// (vertex lists; all faces are added). Points are ordered by dimension,
    /// then lexicographically by vertex list.
    pub fn face_poset(simplices: &[Vec<usize>]) -> Result<Self> {
        Ok(Self::face_poset_with_faces(simplices)?.0)
    }

    /// As [`FinSpace::face_poset`], also returning the sorted vertex list of each point.
    pub fn face_poset_with_faces(simplices: &[Vec<usize>]) -> Result<(Self, Vec<Vec<usize>>)> {
        let mut faces = std::collections::BTreeSet::new();
        for s in simplices {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() > 20 {
                return Err(Error::NotFacePoset("simplex too large".into()));
            }
            for mask in 1u32..(1 << s.len()) {
                let f: Vec<usize> = (0..s.len()).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                faces.insert((f.len(), f));
            }
        }
        let faces: Vec<Vec<usize>> = faces.into_iter().map(|(_, f)| f).collect();
        if faces.len() > 64 {
            return Err(Error::NotFacePoset(format!("{} faces; at most 64 supported", faces.len())));
        }
        let labels = faces
            .iter()
            .map(|f| f.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        let mut pairs = Vec::new();
        for (i, a) in faces.iter().enumerate() {
            for (j, b) in faces.iter().enumerate() {
                if a.iter().all(|v| b.contains(v)) {
                    pairs.push((i, j));
                }
            }
        }
        Ok((Self::new(labels, &pairs)?, faces))
    }

    pub fn point() -> Self {
        Self::new(vec!["*".into()], &[]).unwrap()
    }

    pub fn discrete(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect(), &[]).unwrap()
    }

    /// `p < x`.
    pub fn sierpinski() -> Self {
        Self::new(vec!["p".into(), "x".into()], &[(0, 1)]).unwrap()
    }

    /// Four points `p, q < x, y`: a finite model of the circle.
    pub fn pseudo_circle() -> Self {
        Self::new(
            vec!["p".into(), "q".into(), "x".into(), "y".into()],
            &[(0, 2), (0, 3), (1, 2), (1, 3)],
        )
        .unwrap()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn all(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Points named by `labels`; panics on an unknown label.
    pub fn set(&self, labels: &[&str]) -> PointSet {
        PointSet::from_points(labels.iter().map(|l| self.index_of(l).unwrap_or_else(|| panic!("no point {l}"))))
    }

    pub fn describe(&self, s: PointSet) -> String {
        let names: Vec<&str> = s.iter().map(|x| self.label(x)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn up(&self, x: usize) -> PointSet {
        self.up[x]
    }

    pub fn down(&self, x: usize) -> PointSet {
        self.down[x]
    }

    /// Length of the longest strict chain ending at `x`.
    pub fn height(&self, x: usize) -> usize {
        self.height[x]
    }

    /// Covering pairs `x ⋖ y`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for y in self.up[x].iter() {
                if y != x && !self.up[x].iter().any(|z| z != x && z != y && self.lt(z, y)) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        s.iter().all(|x| self.up[x].is_subset(s))
    }

    pub fn is_closed(&self, s: PointSet) -> bool {
        s.iter().all(|x| self.down[x].is_subset(s))
    }

    /// Smallest closed set containing `s`.
    pub fn closure(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, x| acc.union(self.down[x]))
    }

    /// Closure of `s` inside the subspace `top`.
    pub fn down_closure_in(&self, s: PointSet, top: PointSet) -> PointSet {
        self.closure(s).inter(top)
    }

    /// Smallest open set containing `s`.
    pub fn open_hull(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, x| acc.union(self.up[x]))
    }

    /// Maximal number of strict inequalities in a chain inside `s`; −1 for ∅.
    pub fn dim_of(&self, s: PointSet) -> i64 {
        // Heights inside the subspace can be smaller than ambient heights.
        let pts: Vec<usize> = {
            let mut v: Vec<usize> = s.iter().collect();
            v.sort_by_key(|&x| self.height[x]);
            v
        };
        let mut h: HashMap<usize, i64> = HashMap::new();
        let mut best = -1;
        for &x in &pts {
            let hx = self.down[x]
                .inter(s)
                .iter()
                .filter(|&y| y != x)
                .map(|y| h[&y] + 1)
                .max()
                .unwrap_or(0);
            h.insert(x, hx);
            best = best.max(hx);
        }
        best
    }

    pub fn dim(&self) -> i64 {
        self.dim_of(self.all())
    }

    /// The subspace on `s`, points kept in increasing index order.
    pub fn subspace(&self, s: PointSet) -> FinSpace {
        let pts: Vec<usize> = s.iter().collect();
        let labels = pts.iter().map(|&x| self.labels[x].clone()).collect();
        let mut pairs = Vec::new();
        for (i, &x) in pts.iter().enumerate() {
            for (j, &y) in pts.iter().enumerate() {
                if self.leq(x, y) {
                    pairs.push((i, j));
                }
            }
        }
        FinSpace::new(labels, &pairs).expect("restriction of a partial order")
    }

    /// All closed subsets `lower ⊆ Y ⊆ upper`, in no particular order.
    pub fn closed_between(&self, lower: PointSet, upper: PointSet) -> Vec<PointSet> {
        self.closed_between_in(self.all(), lower, upper)
    }

    /// As [`FinSpace::closed_between`] for subsets closed in the subspace `top`.
    pub fn closed_between_in(&self, top: PointSet, lower: PointSet, upper: PointSet) -> Vec<PointSet> {
        let mut out = Vec::new();
        let upper = upper.inter(top);
        let lower = self.down_closure_in(lower, top);
        if !lower.is_subset(upper) {
            return out;
        }
        let free: Vec<usize> = upper.minus(lower).iter().collect();
        self.closed_rec(top, &free, 0, lower, upper, &mut out);
        out
    }

    fn closed_rec(&self, top: PointSet, free: &[usize], i: usize, cur: PointSet, upper: PointSet, out: &mut Vec<PointSet>) {
        if i == free.len() {
            if cur.iter().all(|x| self.down[x].inter(top).is_subset(cur)) {
                out.push(cur);
            }
            return;
        }
        let x = free[i];
        if cur.contains(x) {
            self.closed_rec(top, free, i + 1, cur, upper, out);
            return;
        }
        self.closed_rec(top, free, i + 1, cur, upper, out);
        let with = cur.union(self.down[x].inter(top));
        if with.is_subset(upper) {
            self.closed_rec(top, free, i + 1, with, upper, out);
        }
    }

    /// Strict chains `x_0 < … < x_p` inside `s`, grouped by `p`.
    pub fn chains(&self, s: PointSet) -> Vec<Vec<Vec<usize>>> {
        let mut out: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut stack = Vec::new();
        for x in s.iter() {
            stack.push(x);
            self.chains_rec(s, &mut stack, &mut out);
            stack.pop();
        }
        out
    }

    fn chains_rec(&self, s: PointSet, stack: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        let p = stack.len() - 1;
        if out.len() <= p {
            out.push(Vec::new());
        }
        out[p].push(stack.clone());
        let last = *stack.last().unwrap();
        for y in self.up[last].inter(s).iter() {
            if y != last {
                stack.push(y);
                self.chains_rec(s, stack, out);
                stack.pop();
            }
        }
    }

    /// Checks that every lower set `↓x` is the face poset of a simplex.
    pub fn check_face_poset(&self) -> Result<()> {
        let mut vertex_sets = std::collections::HashSet::new();
        for x in 0..self.len() {
            let verts = self.down[x].iter().filter(|&v| self.height[v] == 0).collect::<Vec<_>>();
            if !vertex_sets.insert(verts) {
                return Err(Error::NotFacePoset(format!("two faces share the vertices of {}", self.label(x))));
            }
        }
        for x in 0..self.len() {
            let d = self.down[x];
            let h = self.height[x];
            let mins = d.iter().filter(|&y| self.height[y] == 0).count();
            if h >= 63 || d.len() as u64 != (1u64 << (h + 1)) - 1 || mins != h + 1 {
                return Err(Error::NotFacePoset(format!("lower set of {} is not a simplex", self.label(x))));
            }
            // Faces below x correspond to nonempty subsets of its vertices.
            let mut seen = std::collections::HashSet::new();
            for y in d.iter() {
                let verts = self.down[y].inter(d).iter().filter(|&v| self.height[v] == 0).collect::<Vec<_>>();
                if verts.len() != self.height[y] + 1 || !seen.insert(verts) {
                    return Err(Error::NotFacePoset(format!("lower set of {} is not a simplex", self.label(x))));
                }
            }
        }
        Ok(())
    }
}

/// A functor from the specialization poset to presented modules: stalks and
/// restriction maps `F(x) → F(y)` for `x ≤ y`.
#[derive(Clone, Debug)]
pub struct WCSheaf {
    space: FinSpace,
    coef: Coef,
    stalks: Vec<FinMod>,
    /// `rho[x * n + y]` for `x ≤ y`.
    rho: Vec<Option<Mat>>,
}

impl WCSheaf {
    /// `covers` gives a matrix for each covering pair; every other composite
    /// is derived and checked for path independence.
    pub fn new(space: &FinSpace, stalks: Vec<FinMod>, covers: &HashMap<(usize, usize), Mat>) -> Result<Self> {
        let n = space.len();
        if stalks.len() != n {
            return Err(Error::DimensionMismatch(format!("{} stalks for {} points", stalks.len(), n)));
        }
        let coef = stalks
            .first()
            .map(FinMod::coef)
            .ok_or_else(|| Error::DimensionMismatch("sheaf on the empty space needs a coefficient ring".into()))?;
        Self::build(space, coef, stalks, covers)
    }

    pub fn on_empty(coef: Coef) -> Self {
        WCSheaf {
            space: FinSpace::new(vec![], &[]).unwrap(),
            coef,
            stalks: vec![],
            rho: vec![],
        }
    }

    fn build(space: &FinSpace, coef: Coef, stalks: Vec<FinMod>, covers: &HashMap<(usize, usize), Mat>) -> Result<Self> {
        let n = space.len();
        let cov = space.covers();
        for &(x, y) in covers.keys() {
            if !cov.contains(&(x, y)) {
                return Err(Error::NotFunctorial(format!(
                    "({}, {}) is not a covering pair",
                    space.label(x.min(n - 1)),
                    space.label(y.min(n - 1))
                )));
            }
        }
        for &(x, y) in &cov {
            let m = covers.get(&(x, y)).ok_or_else(|| {
                Error::NotFunctorial(format!("missing restriction {} → {}", space.label(x), space.label(y)))
            })?;
            if m.rows() != stalks[x].rank() || m.cols() != stalks[y].rank() {
                return Err(Error::DimensionMismatch(format!(
                    "restriction {} → {} has shape {}x{}",
                    space.label(x),
                    space.label(y),
                    m.rows(),
                    m.cols()
                )));
            }
            ModMap::new(stalks[x].clone(), stalks[y].clone(), m.clone()).map_err(|_| {
                Error::NotWellDefined(format!("restriction {} → {}", space.label(x), space.label(y)))
            })?;
        }
        let mut rho: Vec<Option<Mat>> = vec![None; n * n];
        for x in 0..n {
            rho[x * n + x] = Some(Mat::identity(coef, stalks[x].rank()));
            let mut above: Vec<usize> = space.up(x).iter().filter(|&y| y != x).collect();
            above.sort_by_key(|&y| space.height(y));
            for z in above {
                let mut found: Option<(usize, Mat)> = None;
                for &(y, zz) in &cov {
                    if zz != z || !space.leq(x, y) {
                        continue;
                    }
                    let via = rho[x * n + y].as_ref().expect("computed earlier").mul(&covers[&(y, z)]);
                    match &found {
                        None => found = Some((y, via)),
                        Some((y0, m0)) => {
                            let diff = m0.sub(&via);
                            if !diff.row_iter().all(|r| stalks[z].is_zero_elem(r)) {
                                return Err(Error::NotFunctorial(format!(
                                    "{} < {} < {} and {} < {} < {} disagree",
                                    space.label(x),
                                    space.label(*y0),
                                    space.label(z),
                                    space.label(x),
                                    space.label(y),
                                    space.label(z)
                                )));
                            }
                        }
                    }
                }
                rho[x * n + z] = found.map(|(_, m)| m);
            }
        }
        Ok(WCSheaf {
            space: space.clone(),
            coef,
            stalks,
            rho,
        })
    }

    /// The constant sheaf with stalk `m` everywhere.
    pub fn constant_module(space: &FinSpace, m: &FinMod) -> Self {
        let covers = space
            .covers()
            .into_iter()
            .map(|c| (c, Mat::identity(m.coef(), m.rank())))
            .collect();
        Self::build(space, m.coef(), vec![m.clone(); space.len()], &covers).expect("constant sheaf is functorial")
    }

    pub fn constant(space: &FinSpace, coef: Coef) -> Self {
        Self::constant_module(space, &FinMod::free(coef, 1))
    }

    pub fn space(&self) -> &FinSpace {
        &self.space
    }

    pub fn coef(&self) -> Coef {
        self.coef
    }

    pub fn stalk(&self, x: usize) -> &FinMod {
        &self.stalks[x]
    }

    /// Restriction `F(x) → F(y)`; panics unless `x ≤ y`.
    pub fn rho(&self, x: usize, y: usize) -> &Mat {
        self.rho[x * self.space.len() + y].as_ref().expect("restriction only along x ≤ y")
    }

    /// Restriction to the subspace on `s`.
    pub fn restrict(&self, s: PointSet) -> WCSheaf {
        let pts: Vec<usize> = s.iter().collect();
        let sub = self.space.subspace(s);
        let covers = sub
            .covers()
            .into_iter()
            .map(|(i, j)| ((i, j), self.rho(pts[i], pts[j]).clone()))
            .collect();
        let stalks = pts.iter().map(|&x| self.stalks[x].clone()).collect();
        Self::build(&sub, self.coef, stalks, &covers).expect("restriction of a functor")
    }

    /// `j_! j^* F` for the open `u`: stalks outside `u` become zero.
    pub fn extend_by_zero(&self, u: PointSet) -> Result<WCSheaf> {
        if !self.space.is_open(u) {
            return Err(Error::NotOpen(self.space.describe(u)));
        }
        let n = self.space.len();
        let stalks: Vec<FinMod> = (0..n)
            .map(|x| {
                if u.contains(x) {
                    self.stalks[x].clone()
                } else {
                    FinMod::zero(self.coef)
                }
            })
            .collect();
        let covers = self
            .space
            .covers()
            .into_iter()
            .map(|(x, y)| {
                let m = if u.contains(x) {
                    self.rho(x, y).clone()
                } else {
                    Mat::zeros(self.coef, stalks[x].rank(), stalks[y].rank())
                };
                ((x, y), m)
            })
            .collect();
        Self::build(&self.space, self.coef, stalks, &covers)
    }

    /// `F ⊗ Z/l^{m'}` for a lower level.
    pub fn reduce_to(&self, coef: Coef) -> WCSheaf {
        WCSheaf {
            space: self.space.clone(),
            coef,
            stalks: self.stalks.iter().map(|m| m.reduce_to(coef)).collect(),
            rho: self.rho.iter().map(|m| m.as_ref().map(|m| m.reduce_to(coef))).collect(),
        }
    }
}

/// A closed subset and its open complement.
#[derive(Clone, Debug)]
pub struct SubspacePair {
    space: FinSpace,
    closed: PointSet,
}

impl SubspacePair {
    pub fn new(space: &FinSpace, closed: PointSet) -> Result<Self> {
        if !space.is_closed(closed) {
            return Err(Error::NotClosed(space.describe(closed)));
        }
        Ok(SubspacePair {
            space: space.clone(),
            closed,
        })
    }

    pub fn closed_part(&self) -> PointSet {
        self.closed
    }

    pub fn open_part(&self) -> PointSet {
        self.space.all().minus(self.closed)
    }
}

/// `j_!` of a sheaf living on the open part of `pair`.
pub fn extend_by_zero(pair: &SubspacePair, f: &WCSheaf) -> Result<WCSheaf> {
    let u = pair.open_part();
    let pts: Vec<usize> = u.iter().collect();
    if f.space() != &pair.space.subspace(u) {
        return Err(Error::DimensionMismatch("sheaf does not live on the open part".into()));
    }
    let n = pair.space.len();
    let mut at = vec![None; n];
    for (i, &x) in pts.iter().enumerate() {
        at[x] = Some(i);
    }
    let stalks: Vec<FinMod> = (0..n)
        .map(|x| at[x].map_or_else(|| FinMod::zero(f.coef()), |i| f.stalk(i).clone()))
        .collect();
    let covers = pair
        .space
        .covers()
        .into_iter()
        .map(|(x, y)| {
            let m = match (at[x], at[y]) {
                (Some(i), Some(j)) => f.rho(i, j).clone(),
                _ => Mat::zeros(f.coef(), stalks[x].rank(), stalks[y].rank()),
            };
            ((x, y), m)
        })
        .collect();
    WCSheaf::build(&pair.space, f.coef(), stalks, &covers)
}

/// Cochains on strict chains of `sub` whose top point lies outside `rel`,
/// valued in the stalk at the top point. With `rel = ∅` this is the nerve
/// complex of `F|_sub`; in general it computes `H^*(sub, rel; F)`.
#[derive(Clone, Debug)]
pub struct PairComplex {
    pub complex: Complex,
    sub: PointSet,
    rel: PointSet,
    /// Per degree: chain → coordinate offset.
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl PairComplex {
    pub fn sub(&self) -> PointSet {
        self.sub
    }

    pub fn rel(&self) -> PointSet {
        self.rel
    }

    pub fn offset(&self, p: usize, chain: &[usize]) -> Option<usize> {
        self.index.get(p).and_then(|m| m.get(chain)).copied()
    }

    /// Chains of degree `p` with their coordinate offsets, in no fixed order.
    pub fn chains(&self, p: usize) -> impl Iterator<Item = (&Vec<usize>, usize)> {
        self.index.get(p).into_iter().flat_map(|m| m.iter().map(|(c, &o)| (c, o)))
    }
}

pub fn pair_complex(f: &WCSheaf, sub: PointSet, rel: PointSet) -> Result<PairComplex> {
    let x = f.space();
    if !rel.is_subset(sub) {
        return Err(Error::NotClosed(format!("{} is not inside {}", x.describe(rel), x.describe(sub))));
    }
    for y in rel.iter() {
        if !x.down(y).inter(sub).is_subset(rel) {
            return Err(Error::NotClosed(format!("{} in {}", x.describe(rel), x.describe(sub))));
        }
    }
    let coef = f.coef();
    let chains: Vec<Vec<Vec<usize>>> = x
        .chains(sub)
        .into_iter()
        .map(|cs| cs.into_iter().filter(|c| !rel.contains(*c.last().unwrap())).collect::<Vec<_>>())
        .collect();
    let top = chains.iter().rposition(|c| !c.is_empty()).map_or(0, |p| p + 1);
    let chains = &chains[..top];
    let mut index = Vec::new();
    let mut modules = Vec::new();
    for cs in chains {
        let mut off = 0;
        let mut idx = HashMap::new();
        let mut parts = Vec::new();
        for c in cs {
            idx.insert(c.clone(), off);
            let s = f.stalk(*c.last().unwrap());
            off += s.rank();
            parts.push(s.clone());
        }
        index.push(idx);
        modules.push(FinMod::direct_sum(coef, &parts));
    }
    let mut diffs = Vec::new();
    for p in 0..top.saturating_sub(1) {
        let mut d = Mat::zeros(coef, modules[p].rank(), modules[p + 1].rank());
        for tau in &chains[p + 1] {
            let col = index[p + 1][tau];
            let last = *tau.last().unwrap();
            for i in 0..tau.len() {
                let mut sigma = tau.clone();
                sigma.remove(i);
                let Some(&row) = index[p].get(&sigma) else { continue };
                let sgn = if i % 2 == 0 { 1 } else { -1 };
                let block = if i + 1 == tau.len() {
                    f.rho(*sigma.last().unwrap(), last).scale(sgn)
                } else {
                    Mat::scalar(coef, f.stalk(last).rank(), sgn)
                };
                let cur = d.block(row, col, block.rows(), block.cols());
                d.paste(row, col, &cur.add(&block));
            }
        }
        diffs.push(d);
    }
    let complex = Complex::new_unchecked(coef, 0, modules, diffs)?;
    Ok(PairComplex {
        complex,
        sub,
        rel,
        index,
    })
}

/// Coordinate map between pair complexes for `(sub, rel) → (sub', rel')` with
/// `sub' ⊆ sub` and `rel' ⊆ rel`: restriction of cochains.
pub fn pair_map(f: &WCSheaf, from: &PairComplex, to: &PairComplex) -> Result<ChainMap> {
    if !to.sub.is_subset(from.sub) || !to.rel.is_subset(from.rel) {
        return Err(Error::PreconditionFailed("pair map needs sub' ⊆ sub and rel' ⊆ rel".into()));
    }
    let coef = f.coef();
    let mut maps = Vec::new();
    for (p, idx) in from.index.iter().enumerate() {
        let k = p as i64;
        let mut m = Mat::zeros(coef, from.complex.rank(k), to.complex.rank(k));
        for (chain, &off) in idx {
            if let Some(toff) = to.offset(p, chain) {
                let r = f.stalk(*chain.last().unwrap()).rank();
                m.paste(off, toff, &Mat::identity(coef, r));
            }
        }
        maps.push((k, m));
    }
    ChainMap::new_unchecked(&from.complex, &to.complex, maps)
}

pub fn nerve_complex(f: &WCSheaf) -> Complex {
    pair_complex(f, f.space().all(), PointSet::EMPTY)
        .expect("empty relative part")
        .complex
}

pub fn sheaf_cohomology(f: &WCSheaf, q: i64) -> FinMod {
    nerve_complex(f).cohomology(q)
}

/// `H^q(sub, rel; F)`.
pub fn relative_cohomology(f: &WCSheaf, sub: PointSet, rel: PointSet, q: i64) -> Result<FinMod> {
    Ok(pair_complex(f, sub, rel)?.complex.cohomology(q))
}

/// The relative complex of `(X, Y)` with its termwise short exact sequence
/// `0 → C(X, Y) → C(X) → C(Y) → 0`.
#[derive(Clone, Debug)]
pub struct RelativeComplex {
    pub relative: PairComplex,
    pub absolute: PairComplex,
    pub closed: PairComplex,
    pub incl: ChainMap,
    pub restr: ChainMap,
}

pub fn relative_complex(f: &WCSheaf, y: PointSet) -> Result<RelativeComplex> {
    let x = f.space();
    if !x.is_closed(y) {
        return Err(Error::NotClosed(x.describe(y)));
    }
    let all = x.all();
    let relative = pair_complex(f, all, y)?;
    let absolute = pair_complex(f, all, PointSet::EMPTY)?;
    let closed = pair_complex(f, y, PointSet::EMPTY)?;
    let incl = pair_map(f, &relative, &absolute)?;
    let restr = pair_map(f, &absolute, &closed)?;
    check_ses(&incl, &restr)?;
    Ok(RelativeComplex {
        relative,
        absolute,
        closed,
        incl,
        restr,
    })
}
