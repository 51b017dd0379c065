//! Compatibility of the pipelines with the reduction `Z/l^{m+1} → Z/l^m`.
//!
//! Each check runs a computation on inputs at level `m+1`, runs it again on
//! the reduced inputs at level `m`, and compares the two through the maps
//! induced on cochains.

use crate::cech::{build_compatible, cech_double, Cover};
use crate::cellular::{cellular_complex, comparison, Filtration};
use crate::complex::{total, ChainMap, Complex};
use crate::equivariant::{bar_complex, cl_classes, ClContext, GComplex, GModule};
use crate::error::{Error, Result};
use crate::linalg::{Coef, Mat};
use crate::space::WCSheaf;

#[derive(Clone, Debug)]
pub enum TransitionInput {
    Cellular { sheaf: WCSheaf, filt: Filtration },
    Cech { sheaf: WCSheaf, cover: Cover },
    GroupCohomology { module: GModule, p_max: usize },
    Cl { complex: GComplex, n: i64, z: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionCheck {
    pub name: String,
    pub degree: i64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct TransitionReport {
    pub pipeline: &'static str,
    /// Level of the reduced run.
    pub m: u32,
    pub checks: Vec<TransitionCheck>,
}

impl TransitionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&TransitionCheck> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_failure() {
            Some(c) => Err(Error::TransitionMismatch {
                degree: c.degree,
                detail: format!("{}: {}", c.name, c.detail),
            }),
            None => Ok(self),
        }
    }

    fn push(&mut self, name: &str, degree: i64, pass: bool, detail: impl Into<String>) {
        self.checks.push(TransitionCheck {
            name: name.to_string(),
            degree,
            pass,
            detail: detail.into(),
        });
    }
}

fn lower(coef: Coef) -> Result<Coef> {
    if coef.m() < 2 {
        return Err(Error::InvalidCoef("transition checks need inputs at level m+1 ≥ 2".into()));
    }
    coef.at_level(coef.m() - 1)
}

fn reduce_vec(v: &[u64], c: Coef) -> Vec<u64> {
    v.iter().map(|&x| x % c.modulus()).collect()
}

/// Checks that `maps` (read at the lower level) form a chain map
/// `hi ⊗ Z/l^m → lo`, whether each component is an isomorphism, and that
/// the maps on cohomology `H(hi) → H(lo)` are defined.
fn compare_complexes(rep: &mut TransitionReport, what: &str, hi: &Complex, lo: &Complex, maps: Vec<(i64, Mat)>, want_iso: bool) -> Option<ChainMap> {
    let red = hi.reduce_to(lo.coef());
    let f = match ChainMap::new(&red, lo, maps.clone()) {
        Ok(f) => f,
        Err(Error::NotAChainMap(k)) => {
            rep.push(&format!("{what}: chain map"), k, false, "reduction does not commute with d");
            return None;
        }
        Err(e) => {
            let k = maps.first().map_or(0, |m| m.0);
            rep.push(&format!("{what}: chain map"), k, false, e.to_string());
            return None;
        }
    };
    for k in hi.lo().min(lo.lo())..=hi.hi().max(lo.hi()) {
        let iso = f.component(k).is_iso();
        if want_iso {
            rep.push(&format!("{what}: termwise"), k, iso, if iso { "isomorphism" } else { "not an isomorphism" });
        }
        let h = hi.cohomology_sq(k).induced(&lo.cohomology_sq(k), &f.map(k));
        rep.push(
            &format!("{what}: cohomology"),
            k,
            h.is_ok(),
            match &h {
                Ok(m) => format!("{} → {}", m.source().describe(), m.target().describe()),
                Err(e) => e.to_string(),
            },
        );
    }
    rep.push(&format!("{what}: chain map"), hi.lo(), true, "commutes");
    Some(f)
}

fn stalks_free(f: &WCSheaf) -> bool {
    (0..f.space().len()).all(|x| f.stalk(x).is_free())
}

/// Runs the named computation at level `m+1` (the level of the input) and at `m`.
pub fn level_transition_check(input: &TransitionInput) -> Result<TransitionReport> {
    match input {
        TransitionInput::Cellular { sheaf, filt } => cellular_transition(sheaf, filt),
        TransitionInput::Cech { sheaf, cover } => cech_transition(sheaf, cover),
        TransitionInput::GroupCohomology { module, p_max } => group_transition(module, *p_max),
        TransitionInput::Cl { complex, n, z } => cl_transition(complex, *n, z),
    }
}

fn cellular_transition(f_hi: &WCSheaf, filt: &Filtration) -> Result<TransitionReport> {
    let lc = lower(f_hi.coef())?;
    let f_lo = f_hi.reduce_to(lc);
    let mut rep = TransitionReport {
        pipeline: "cellular",
        m: lc.m(),
        checks: Vec::new(),
    };
    let hi = cellular_complex(f_hi, filt)?;
    let lo = cellular_complex(&f_lo, filt)?;
    let maps = (0..hi.h.len())
        .map(|i| {
            let amb = hi.h[i].ambient().rank();
            hi.h[i].induced(&lo.h[i], &Mat::identity(lc, amb)).map(|m| (i as i64, m.matrix().clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(phi) = compare_complexes(&mut rep, "D", &hi.d, &lo.d, maps, stalks_free(f_hi)) else {
        return Ok(rep);
    };
    // ψ commutes with reduction: H(D_{m+1}) → H(N_m) both ways round.
    let (ch, cl) = (comparison(f_hi, &hi)?, comparison(&f_lo, &lo)?);
    let (nh, nl) = (&ch.nerve.complex, &cl.nerve.complex);
    for k in hi.d.degrees() {
        let psi_hi = ch.psi(k)?;
        let psi_lo = cl.psi(k)?;
        let r_d = hi.d.cohomology_sq(k).induced(&lo.d.cohomology_sq(k), &phi.map(k))?;
        let r_n = nh
            .cohomology_sq(k)
            .induced(&nl.cohomology_sq(k), &Mat::identity(lc, nh.rank(k)))?;
        let r = psi_hi.source().rank();
        let target = psi_lo.target();
        let ok = (0..r).all(|i| {
            let mut e = vec![0; r];
            e[i] = 1;
            let a = r_n.apply(&reduce_vec(&psi_hi.apply(&e), lc));
            let b = psi_lo.apply(&r_d.apply(&reduce_vec(&e, lc)));
            let d: Vec<u64> = a.iter().zip(&b).map(|(&x, &y)| lc.sub(x, y)).collect();
            target.is_zero_elem(&d)
        });
        rep.push("ψ square", k, ok, if ok { "commutes" } else { "ψ does not commute with reduction" });
    }
    Ok(rep)
}

fn cech_transition(f_hi: &WCSheaf, cover: &Cover) -> Result<TransitionReport> {
    let lc = lower(f_hi.coef())?;
    let f_lo = f_hi.reduce_to(lc);
    let mut rep = TransitionReport {
        pipeline: "cech",
        m: lc.m(),
        checks: Vec::new(),
    };
    let filts = build_compatible(f_hi, cover)?;
    let hi = cech_double(f_hi, cover, &filts)?;
    let lo = cech_double(&f_lo, cover, &filts)?;
    let (th, tl) = (total(&hi.double), total(&lo.double));
    let mut maps = Vec::new();
    for nn in th.degrees() {
        let mut blocks = Vec::new();
        for (p, q, _) in hi.double.total_layout(nn) {
            for ((s_hi, c_hi), (s_lo, c_lo)) in hi.cells.iter().zip(&lo.cells) {
                debug_assert_eq!(s_hi, s_lo);
                if s_hi.len() as i64 != p + 1 || q < 0 || q as usize >= c_hi.h.len() {
                    continue;
                }
                let amb = c_hi.h[q as usize].ambient().rank();
                blocks.push(c_hi.h[q as usize].induced(&c_lo.h[q as usize], &Mat::identity(lc, amb))?.matrix().clone());
            }
        }
        maps.push((nn, Mat::block_diag(lc, &blocks.iter().collect::<Vec<_>>())));
    }
    compare_complexes(&mut rep, "Tot", &th, &tl, maps, stalks_free(f_hi));
    Ok(rep)
}

fn group_transition(m_hi: &GModule, p_max: usize) -> Result<TransitionReport> {
    let lc = lower(m_hi.coef())?;
    let m_lo = m_hi.reduce_to(lc);
    let mut rep = TransitionReport {
        pipeline: "group-cohomology",
        m: lc.m(),
        checks: Vec::new(),
    };
    let hi = bar_complex(m_hi, p_max + 1);
    let lo = bar_complex(&m_lo, p_max + 1);
    let maps = hi.degrees().map(|k| (k, Mat::identity(lc, hi.rank(k)))).collect();
    compare_complexes(&mut rep, "bar", &hi, &lo, maps, true);
    rep.checks.retain(|c| !(c.name == "bar: cohomology" && c.degree > p_max as i64));
    Ok(rep)
}

fn cl_transition(k_hi: &GComplex, n: i64, z: &[u64]) -> Result<TransitionReport> {
    let lc = lower(k_hi.coef())?;
    let k_lo = k_hi.reduce_to(lc);
    let mut rep = TransitionReport {
        pipeline: "cl",
        m: lc.m(),
        checks: Vec::new(),
    };
    let (hi, lo) = (ClContext::new(k_hi, n)?, ClContext::new(&k_lo, n)?);
    let maps = hi.tot.degrees().map(|k| (k, Mat::identity(lc, hi.tot.rank(k)))).collect();
    if compare_complexes(&mut rep, "Tot", &hi.tot, &lo.tot, maps, true).is_none() {
        return Ok(rep);
    }
    rep.checks.retain(|c| c.name != "Tot: cohomology" || c.degree == n);
    let c_hi = cl_classes(&hi, z)?;
    let c_lo = cl_classes(&lo, &reduce_vec(z, lc))?;
    for (a, b) in c_hi.classes.iter().zip(&c_lo.classes) {
        if !a.defined || !b.defined {
            continue;
        }
        let pushed = hi.reduce_class(a.j, &a.value, &lo)?;
        let ok = b.coset_contains(&pushed);
        rep.push(
            &format!("cl^{}", a.j),
            a.j as i64,
            ok,
            if ok { "r_*(cl(z)) ≡ cl(r z)".to_string() } else { format!("{:?} vs {:?}", pushed, b.value) },
        );
    }
    Ok(rep)
}
