//! Deterministic instance families: simplicial complexes, covers, open
//! subsets and random G-complexes. Everything is driven by explicit seeds.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cech::Cover;
use crate::cellular::{search_filtration_with, skeleton_filtration, Filtration, SearchOptions};
use crate::equivariant::{equivariant_hom_basis, ClContext, FinGroup, GComplex, GModule, Twist};
use crate::linalg::{vecops, Coef, FinMod, Mat};
use crate::space::{FinSpace, PointSet, WCSheaf};
use crate::yoneda::Triangle;
use crate::Result;

/// Maximal faces of a simplicial complex on vertices `0..n`.
pub type Facets = Vec<Vec<usize>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn permute_mask(mask: u32, perm: &[usize]) -> u32 {
    (0..perm.len()).filter(|&v| mask >> v & 1 == 1).fold(0, |acc, v| acc | 1 << perm[v])
}

fn facets_of(n: usize, faces: &[u32]) -> Facets {
    let mut all: Vec<u32> = faces.to_vec();
    all.extend((0..n).map(|v| 1u32 << v));
    let mut out: Vec<Vec<usize>> = all
        .iter()
        .filter(|&&f| !all.iter().any(|&g| g != f && g & f == f))
        .map(|&f| (0..n).filter(|&v| f >> v & 1 == 1).collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Complexes with vertex set exactly `0..n` and dimension at most `max_dim`,
/// one per isomorphism class.
pub fn complexes_up_to_iso(n: usize, max_dim: usize) -> Vec<Facets> {
    assert!(n <= 6, "exhaustive enumeration is limited to 6 vertices");
    let faces: Vec<u32> = (1u32..1 << n)
        .filter(|f| (2..=max_dim + 1).contains(&(f.count_ones() as usize)))
        .collect();
    assert!(faces.len() <= 20, "too many candidate faces");
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for choice in 0u64..1 << faces.len() {
        let chosen: Vec<u32> = (0..faces.len()).filter(|&i| choice >> i & 1 == 1).map(|i| faces[i]).collect();
        let set: BTreeSet<u32> = chosen.iter().copied().collect();
        let closed = chosen.iter().all(|&f| {
            f.count_ones() <= 2 || (0..n).filter(|&v| f >> v & 1 == 1).all(|v| set.contains(&(f & !(1 << v))))
        });
        if !closed {
            continue;
        }
        let key = perms
            .iter()
            .map(|p| {
                let mut k: Vec<u32> = chosen.iter().map(|&f| permute_mask(f, p)).collect();
                k.sort_unstable();
                k
            })
            .min()
            .unwrap_or_default();
        if seen.insert(key) {
            out.push(facets_of(n, &chosen));
        }
    }
    out
}

/// Every simplicial complex on at most `max_n` vertices, up to isomorphism.
pub fn small_complexes(max_n: usize) -> Vec<Facets> {
    (1..=max_n).flat_map(|n| complexes_up_to_iso(n, n.saturating_sub(1))).collect()
}

/// Graphs (1-dimensional complexes) on at most `max_n` vertices, up to isomorphism.
pub fn graphs(max_n: usize) -> Vec<Facets> {
    (1..=max_n).flat_map(|n| complexes_up_to_iso(n, 1)).collect()
}

/// Random complexes on exactly `n` vertices with faces of dimension at most `max_dim`.
pub fn random_complexes(n: usize, count: usize, max_dim: usize, seed: u64) -> Vec<Facets> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let k = r.gen_range(1..=n + 1);
            let mut faces: Vec<u32> = (0..k)
                .map(|_| {
                    let size = r.gen_range(2..=(max_dim + 1).min(n));
                    let mut vs: Vec<usize> = (0..n).collect();
                    vs.shuffle(&mut r);
                    vs[..size].iter().fold(0, |acc, &v| acc | 1 << v)
                })
                .collect();
            faces.sort_unstable();
            faces.dedup();
            facets_of(n, &faces)
        })
        .collect()
}

/// The default test corpus: all complexes on ≤ 4 vertices up to isomorphism
/// followed by `random_five` random complexes on 5 vertices.
pub fn corpus(random_five: usize, seed: u64) -> Vec<Facets> {
    let mut out = small_complexes(4);
    out.extend(random_complexes(5, random_five, 3, seed));
    out
}

/// Face poset together with the vertex list of each point.
pub fn face_space(facets: &Facets) -> Result<(FinSpace, Vec<Vec<usize>>)> {
    FinSpace::face_poset_with_faces(facets)
}

/// Union of the open stars of the given vertices.
pub fn open_star(faces: &[Vec<usize>], verts: &[usize]) -> PointSet {
    PointSet::from_points((0..faces.len()).filter(|&x| faces[x].iter().any(|v| verts.contains(v))))
}

/// A cover by `k` open stars of a random partition of the vertices.
pub fn random_star_cover(space: &FinSpace, faces: &[Vec<usize>], k: usize, r: &mut impl Rng) -> Result<Cover> {
    let mut verts: Vec<usize> = faces.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let k = k.clamp(1, verts.len().max(1));
    verts.shuffle(r);
    let mut groups = vec![Vec::new(); k];
    for (i, &v) in verts.iter().enumerate() {
        let g = if i < k { i } else { r.gen_range(0..k) };
        groups[g].push(v);
    }
    Cover::new(space, groups.iter().map(|g| open_star(faces, g)).collect())
}

/// Up-closure of one or two random points.
pub fn random_open(space: &FinSpace, r: &mut impl Rng) -> PointSet {
    let picks = r.gen_range(1..=2);
    (0..picks).fold(PointSet::EMPTY, |acc, _| acc.union(space.up(r.gen_range(0..space.len()))))
}

fn search_relaxing(f: &WCSheaf, mut opts: SearchOptions) -> Result<Filtration> {
    search_filtration_with(f, &opts).or_else(|_| {
        opts.dim_bound = false;
        search_filtration_with(f, &opts)
    })
}

/// Filtrations of `X` and of the open `V` with `V_i ⊆ X_i`, both valid for
/// `f`. The skeleton of `X` is tried first; otherwise `V` is filtered on its
/// own and `X` is searched above it.
pub fn restriction_filtrations(f: &WCSheaf, v: PointSet) -> Result<(Filtration, Filtration)> {
    let space = f.space();
    let n = space.dim().max(0) as usize;
    if let Ok(fx) = skeleton_filtration(space) {
        let mut opts = SearchOptions::for_subset(v, n);
        for i in 0..n {
            opts.upper[i] = fx.level(i as i64).inter(v);
        }
        if let Ok(fv) = search_relaxing(f, opts) {
            return Ok((fx, fv));
        }
    }
    let fv = search_relaxing(f, SearchOptions::for_subset(v, n))?;
    let mut opts = SearchOptions::for_space(space);
    for i in 0..=n {
        opts.lower[i] = fv.level(i as i64);
    }
    Ok((search_relaxing(f, opts)?, fv))
}

/// The groups used by the equivariant suites.
pub fn suite_groups() -> Vec<FinGroup> {
    vec![FinGroup::trivial(), FinGroup::cyclic(2), FinGroup::cyclic(3)]
}

fn random_vec(coef: Coef, n: usize, r: &mut impl Rng) -> Vec<u64> {
    (0..n).map(|_| r.gen_range(0..coef.modulus())).collect()
}

fn random_combination(coef: Coef, basis: &Mat, r: &mut impl Rng) -> Vec<u64> {
    let mut v = vec![0; basis.cols()];
    for row in basis.row_iter() {
        vecops::axpy(coef, &mut v, r.gen_range(0..coef.modulus()), row);
    }
    v
}

/// A small G-module: a sum of one or two of the trivial module `R`, a
/// trivial cyclic module of smaller exponent, `R[G]` and the sign module.
pub fn random_gmodule(g: &FinGroup, coef: Coef, r: &mut impl Rng) -> Result<GModule> {
    let pieces = r.gen_range(1..=2);
    let mut parts = Vec::new();
    for _ in 0..pieces {
        let part = match r.gen_range(0..4) {
            0 => GModule::trivial(g, FinMod::free(coef, 1)),
            1 if coef.m() > 1 => GModule::trivial(g, FinMod::cyclic(coef, r.gen_range(1..coef.m()))),
            2 if g.order() > 1 => GModule::regular(g, coef),
            3 if g.order().is_multiple_of(2) => {
                let chi = (0..g.order()).map(|x| if x % 2 == 0 { 1 } else { coef.modulus() - 1 }).collect();
                GModule::trivial(g, FinMod::free(coef, 1)).twist(&Twist::new(g, coef, chi, 1)?)
            }
            _ => GModule::trivial(g, FinMod::free(coef, 1)),
        };
        parts.push(part);
    }
    Ok(GModule::direct_sum(&parts))
}

/// A random G-equivariant complex in degrees `0..len` with random
/// equivariant differentials satisfying `d∘d = 0`.
pub fn random_gcomplex(g: &FinGroup, coef: Coef, len: usize, r: &mut impl Rng) -> Result<GComplex> {
    let mods = (0..len).map(|_| random_gmodule(g, coef, r)).collect::<Result<Vec<_>>>()?;
    let mut diffs: Vec<Mat> = Vec::new();
    for k in 0..len.saturating_sub(1) {
        let (m, n) = (&mods[k], &mods[k + 1]);
        let basis = equivariant_hom_basis(m, n, diffs.last());
        let flat = random_combination(coef, &basis, r);
        let rows = flat.chunks(n.rank().max(1)).take(m.rank()).map(|c| c[..n.rank()].to_vec()).collect();
        diffs.push(Mat::from_residue_rows(coef, n.rank(), rows));
    }
    GComplex::from_modules(g, 0, &mods, diffs)
}

/// `B` random of length 3 and `A ⊆ B` generated by the orbit of one random
/// vector per degree, closed under `d`.
pub fn random_triangle(g: &FinGroup, coef: Coef, r: &mut impl Rng) -> Result<Triangle> {
    let b = random_gcomplex(g, coef, 3, r)?;
    let bc = b.complex();
    let mut gens: Vec<(i64, Mat)> = Vec::new();
    for k in bc.degrees() {
        let rank = bc.rank(k);
        let mut rows: Vec<Vec<u64>> = Vec::new();
        if let Some((_, prev)) = gens.last() {
            rows.extend(prev.row_iter().map(|x| bc.diff(k - 1).apply(x)));
        }
        if r.gen_bool(0.7) {
            let v = random_vec(coef, rank, r);
            for x in 0..g.order() {
                rows.push(b.gmodule(k).action(x).apply(&v));
            }
        }
        gens.push((k, Mat::from_residue_rows(coef, rank, rows)));
    }
    let n0 = r.gen_range(0..=1);
    Triangle::from_subcomplex(b, &gens, n0)
}

/// A random complex `B`, `n₀`, and a random cocycle of `Tot^{n₀+2}` of the
/// Hochschild–Serre double complex. The cycle-class precondition is not checked.
pub fn random_splitting_instance(g: &FinGroup, coef: Coef, r: &mut impl Rng) -> Result<(GComplex, i64, Vec<u64>)> {
    let b = random_gcomplex(g, coef, 2, r)?;
    let n0 = 0;
    let ctx = ClContext::new(&b, n0 + 2)?;
    let z = random_combination(coef, &ctx.tot.diff_map(n0 + 2).kernel_gens(), r);
    Ok((b, n0, z))
}
