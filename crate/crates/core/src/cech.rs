//! Čech double complexes of cellular complexes for an open cover.

use crate::cellular::{cellular_complex, induced_cellular_map, search_filtration_with, Cellular, Filtration, SearchOptions};
use crate::complex::{total, DoubleComplex};
use crate::error::{Error, Result};
use crate::linalg::{FinMod, Mat};
use crate::space::{nerve_complex, FinSpace, PointSet, WCSheaf};

/// Open sets `U_0, …, U_{s-1}` covering the space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    opens: Vec<PointSet>,
}

impl Cover {
    pub fn new(space: &FinSpace, opens: Vec<PointSet>) -> Result<Self> {
        if opens.is_empty() {
            return Err(Error::NotOpen("empty cover".into()));
        }
        if opens.len() > 8 {
            return Err(Error::Unsupported(format!("{} opens; at most 8 supported", opens.len())));
        }
        for &u in &opens {
            if !space.is_open(u) {
                return Err(Error::NotOpen(space.describe(u)));
            }
        }
        let union = opens.iter().fold(PointSet::EMPTY, |a, &u| a.union(u));
        if union != space.all() {
            return Err(Error::NotOpen(format!(
                "cover misses {}",
                space.describe(space.all().minus(union))
            )));
        }
        Ok(Cover { opens })
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn len(&self) -> usize {
        self.opens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opens.is_empty()
    }

    /// `U_S = ⋂_{i ∈ S} U_i`.
    pub fn intersection(&self, s: &[usize]) -> PointSet {
        s.iter().fold(PointSet::full(64), |a, &i| a.inter(self.opens[i]))
    }

    /// Index subsets of size `k`, lexicographic.
    pub fn subsets(&self, k: usize) -> Vec<Vec<usize>> {
        let n = self.opens.len();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
            }
        }
        out.sort();
        out
    }
}

fn name(s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("U_{{{}}}", parts.join(","))
}

/// One filtration of each `U_S`, all with the same number of levels.
#[derive(Clone, Debug)]
pub struct CompatibleFiltrations {
    pub n: usize,
    pub entries: Vec<(Vec<usize>, Filtration)>,
}

impl CompatibleFiltrations {
    pub fn get(&self, s: &[usize]) -> Option<&Filtration> {
        self.entries.iter().find(|(t, _)| t == s).map(|(_, f)| f)
    }

    /// Checks `C^i_T ⊆ C^i_S` whenever `S ⊆ T`, before any cohomology is computed.
    pub fn check_containment(&self, space: &FinSpace) -> Result<()> {
        for (t, ft) in &self.entries {
            for (s, fs) in &self.entries {
                if s.len() + 1 != t.len() || !s.iter().all(|i| t.contains(i)) {
                    continue;
                }
                for i in 0..=self.n as i64 {
                    if !ft.level(i).is_subset(fs.level(i)) {
                        return Err(Error::ContainmentViolated(format!(
                            "level {i} of {} = {} is not inside level {i} of {} = {}",
                            name(t),
                            space.describe(ft.level(i)),
                            name(s),
                            space.describe(fs.level(i))
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Chooses filtrations deepest intersection first, each level forced to
/// contain the levels already chosen for deeper intersections. A search with
/// `dim X_i ≤ i` is tried before one imposing only vanishing and containment.
pub fn build_compatible(f: &WCSheaf, cover: &Cover) -> Result<CompatibleFiltrations> {
    let space = f.space();
    let n = space.dim().max(0) as usize;
    let mut entries: Vec<(Vec<usize>, Filtration)> = Vec::new();
    for size in (1..=cover.len()).rev() {
        for s in cover.subsets(size) {
            let top = cover.intersection(&s);
            let mut opts = SearchOptions::for_subset(top, n);
            for (t, ft) in &entries {
                if t.len() == s.len() + 1 && s.iter().all(|i| t.contains(i)) {
                    for i in 0..=n {
                        opts.lower[i] = opts.lower[i].union(ft.level(i as i64));
                    }
                }
            }
            let found = search_filtration_with(f, &opts).or_else(|_| {
                opts.dim_bound = false;
                search_filtration_with(f, &opts)
            });
            match found {
                Ok(filt) => entries.push((s, filt)),
                Err(Error::NotFound(_)) => {
                    let partial: Vec<String> = entries
                        .iter()
                        .map(|(t, ft)| format!("{} = {:?}", name(t), ft.describe(space)))
                        .collect();
                    return Err(Error::NotFound(format!(
                        "no compatible filtration of {} = {}; chosen so far: [{}]",
                        name(&s),
                        space.describe(top),
                        partial.join("; ")
                    )));
                }
                Err(e) => return Err(e),
            }
        }
    }
    entries.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    let c = CompatibleFiltrations { n, entries };
    c.check_containment(space)?;
    Ok(c)
}

#[derive(Clone, Debug)]
pub struct CechDouble {
    pub double: DoubleComplex,
    /// Cellular complexes `D_S`, ordered as in the columns.
    pub cells: Vec<(Vec<usize>, Cellular)>,
}

/// Column `p` holds `⊕_{|S| = p+1} D_S`; the horizontal map is the
/// alternating sum over deleted indices of the induced restrictions.
pub fn cech_double(f: &WCSheaf, cover: &Cover, filts: &CompatibleFiltrations) -> Result<CechDouble> {
    let space = f.space();
    let coef = f.coef();
    filts.check_containment(space)?;
    let n = filts.n;
    let s = cover.len();
    let mut cells: Vec<(Vec<usize>, Cellular)> = Vec::new();
    for size in 1..=s {
        for idx in cover.subsets(size) {
            let filt = filts
                .get(&idx)
                .ok_or_else(|| Error::InvalidFiltration(format!("no filtration for {}", name(&idx))))?;
            if filt.n() != n || filt.top() != cover.intersection(&idx) {
                return Err(Error::InvalidFiltration(format!("filtration of {} has the wrong shape", name(&idx))));
            }
            let cell = cellular_complex(f, filt)
                .map_err(|e| Error::InvalidFiltration(format!("{}: {e}", name(&idx))))?;
            cells.push((idx, cell));
        }
    }
    let column = |p: usize| -> Vec<usize> { (0..cells.len()).filter(|&i| cells[i].0.len() == p + 1).collect() };
    let mut entries = Vec::new();
    for p in 0..s {
        let col = column(p);
        entries.push(
            (0..=n as i64)
                .map(|q| FinMod::direct_sum(coef, &col.iter().map(|&i| cells[i].1.d.module(q)).collect::<Vec<_>>()))
                .collect::<Vec<_>>(),
        );
    }
    let mut dv = Vec::new();
    for p in 0..s {
        let col = column(p);
        dv.push(
            (0..n as i64)
                .map(|q| {
                    let blocks: Vec<Mat> = col.iter().map(|&i| cells[i].1.d.diff(q)).collect();
                    Mat::block_diag(coef, &blocks.iter().collect::<Vec<_>>())
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut dh = Vec::new();
    for p in 0..s.saturating_sub(1) {
        let src = column(p);
        let dst = column(p + 1);
        let mut maps = Vec::new();
        for &j in &dst {
            let big = &cells[j].0;
            for (del, _) in big.iter().enumerate() {
                let mut small = big.clone();
                small.remove(del);
                let i = *src.iter().find(|&&i| cells[i].0 == small).expect("faces are present");
                let m = induced_cellular_map(f, &cells[i].1, &cells[j].1)?;
                let sign = if del % 2 == 0 { 1 } else { -1 };
                maps.push((i, j, sign, m));
            }
        }
        let mut row = Vec::new();
        for q in 0..=n as i64 {
            let offsets = |col: &[usize]| -> Vec<usize> {
                let mut o = 0;
                col.iter()
                    .map(|&i| {
                        let r = o;
                        o += cells[i].1.d.rank(q);
                        r
                    })
                    .collect()
            };
            let (so, to) = (offsets(&src), offsets(&dst));
            let rows: usize = src.iter().map(|&i| cells[i].1.d.rank(q)).sum();
            let cols: usize = dst.iter().map(|&i| cells[i].1.d.rank(q)).sum();
            let mut h = Mat::zeros(coef, rows, cols);
            for (i, j, sign, m) in &maps {
                let r = so[src.iter().position(|x| x == i).unwrap()];
                let c = to[dst.iter().position(|x| x == j).unwrap()];
                let block = m.map(q).scale(*sign);
                let cur = h.block(r, c, block.rows(), block.cols());
                h.paste(r, c, &cur.add(&block));
            }
            row.push(h);
        }
        dh.push(row);
    }
    let double = DoubleComplex::new(coef, 0, 0, entries, dh, dv)?;
    Ok(CechDouble { double, cells })
}

#[derive(Clone, Debug)]
pub struct Theorem22Report {
    pub total: Vec<(i64, Vec<u32>)>,
    pub global: Vec<(i64, Vec<u32>)>,
    /// Degrees where the invariant factors differ.
    pub mismatches: Vec<i64>,
}

impl Theorem22Report {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `H^*(Tot)` with `H^*(X; F)` degree by degree.
pub fn verify_theorem22(f: &WCSheaf, cover: &Cover, filts: &CompatibleFiltrations) -> Result<Theorem22Report> {
    let cd = cech_double(f, cover, filts)?;
    let tot = total(&cd.double);
    let nerve = nerve_complex(f);
    let hi = tot.hi().max(nerve.hi());
    let mut t = Vec::new();
    let mut g = Vec::new();
    let mut mismatches = Vec::new();
    for k in 0..=hi {
        let a = tot.cohomology(k).invariant_factors();
        let b = nerve.cohomology(k).invariant_factors();
        if a != b {
            mismatches.push(k);
        }
        t.push((k, a));
        g.push((k, b));
    }
    Ok(Theorem22Report {
        total: t,
        global: g,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Coef;

    fn z2() -> Coef {
        Coef::new(2, 1).unwrap()
    }

    #[test]
    fn single_open_cover() {
        let x = FinSpace::pseudo_circle();
        let f = WCSheaf::constant(&x, z2());
        let cover = Cover::new(&x, vec![x.all()]).unwrap();
        let filts = build_compatible(&f, &cover).unwrap();
        assert_eq!(filts.get(&[0]).unwrap().level(0), x.set(&["p", "q"]));
        let cd = cech_double(&f, &cover, &filts).unwrap();
        assert_eq!(cd.double.shape(), (1, 2));
        assert!(verify_theorem22(&f, &cover, &filts).unwrap().holds());
    }

    #[test]
    fn two_arcs_of_the_circle() {
        let x = FinSpace::pseudo_circle();
        let f = WCSheaf::constant(&x, z2());
        let cover = Cover::new(&x, vec![x.set(&["x", "y", "p"]), x.set(&["x", "y", "q"])]).unwrap();
        let filts = build_compatible(&f, &cover).unwrap();
        let cd = cech_double(&f, &cover, &filts).unwrap();
        let d = &cd.double;
        assert_eq!(d.entry(0, 0).invariant_factors(), vec![1, 1]);
        assert!(d.entry(0, 1).is_zero());
        assert_eq!(d.entry(1, 0).invariant_factors(), vec![1, 1]);
        let r = verify_theorem22(&f, &cover, &filts).unwrap();
        assert!(r.holds());
        assert_eq!(r.total, vec![(0, vec![1]), (1, vec![1]), (2, vec![])]);
    }

    #[test]
    fn open_stars_of_the_triangle_boundary() {
        let x = FinSpace::face_poset(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let f = WCSheaf::constant(&x, z2());
        let u0 = x.open_hull(x.set(&["0"]));
        let u1 = x.open_hull(x.set(&["1", "2"]));
        let cover = Cover::new(&x, vec![u0, u1]).unwrap();
        let filts = build_compatible(&f, &cover).unwrap();
        assert!(verify_theorem22(&f, &cover, &filts).unwrap().holds());
    }

    #[test]
    fn culprit_is_named() {
        // U_{0,1} = {x, y} is discrete, so its X_0 is all of it; containment
        // then forces X_0 = X for U_0, which carries H^1.
        let x = FinSpace::pseudo_circle();
        let f = WCSheaf::constant(&x, z2());
        let cover = Cover::new(&x, vec![x.all(), x.set(&["x", "y"])]).unwrap();
        match build_compatible(&f, &cover) {
            Err(Error::NotFound(msg)) => assert!(msg.contains("U_{0}"), "{msg}"),
            other => panic!("expected NotFound, got {other:?}"),
        }
        assert!(matches!(Cover::new(&x, vec![x.set(&["p", "x", "y"])]), Err(Error::NotOpen(_))));
    }
}
