//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's cohomology code.

#![allow(dead_code)]

use std::collections::HashSet;

/// A finite abelian group `⊕ Z/n_i` with a left action of a group given by
/// its multiplication table; `g·x = x·A_g` on coordinate rows.
pub struct ActedGroup {
    pub moduli: Vec<u64>,
    pub table: Vec<Vec<usize>>,
    pub action: Vec<Vec<Vec<u64>>>,
}

type Elem = Vec<u64>;
type Cochain = Vec<Elem>;

impl ActedGroup {
    pub fn elements(&self) -> Vec<Elem> {
        let mut out = vec![vec![]];
        for &n in &self.moduli {
            out = out
                .into_iter()
                .flat_map(|v: Elem| {
                    (0..n).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn zero(&self) -> Elem {
        vec![0; self.moduli.len()]
    }

    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).zip(&self.moduli).map(|((x, y), n)| (x + y) % n).collect()
    }

    fn neg(&self, a: &Elem) -> Elem {
        a.iter().zip(&self.moduli).map(|(x, n)| (n - x) % n).collect()
    }

    fn scale(&self, a: &Elem, s: u64) -> Elem {
        a.iter().zip(&self.moduli).map(|(x, n)| x * (s % n) % n).collect()
    }

    fn act(&self, g: usize, x: &Elem) -> Elem {
        let a = &self.action[g];
        (0..self.moduli.len())
            .map(|j| {
                let n = self.moduli[j];
                x.iter().enumerate().fold(0, |acc, (i, xi)| (acc + xi * (a[i][j] % n)) % n)
            })
            .collect()
    }

    fn order(&self) -> u64 {
        self.moduli.iter().product()
    }
}

fn all_cochains(m: &ActedGroup, slots: usize) -> Vec<Cochain> {
    let elems = m.elements();
    let mut out: Vec<Cochain> = vec![vec![]];
    for _ in 0..slots {
        out = out
            .into_iter()
            .flat_map(|c| {
                elems.iter().map(move |e| {
                    let mut d = c.clone();
                    d.push(e.clone());
                    d
                })
            })
            .collect();
    }
    out
}

/// `log_l |H[l^k]|` for `k = 1..=kmax`, where `H = Z/B`.
fn torsion_profile(m: &ActedGroup, z: &[Cochain], b: &HashSet<Cochain>, l: u64, kmax: u32) -> Vec<u32> {
    let log = |mut n: u64| {
        let mut e = 0;
        while n > 1 {
            assert_eq!(n % l, 0);
            n /= l;
            e += 1;
        }
        e
    };
    (1..=kmax)
        .map(|k| {
            let s = l.pow(k);
            let killed = z
                .iter()
                .filter(|c| b.contains(&c.iter().map(|e| m.scale(e, s)).collect::<Cochain>()))
                .count() as u64;
            assert_eq!(killed % b.len() as u64, 0);
            log(killed / b.len() as u64)
        })
        .collect()
}

/// The same profile computed from invariant-factor exponents.
pub fn profile_of_factors(factors: &[u32], kmax: u32) -> Vec<u32> {
    (1..=kmax).map(|k| factors.iter().map(|&e| e.min(k)).sum()).collect()
}

fn profile_of_complex<D1, D2>(
    m: &ActedGroup,
    prev: Option<(Vec<Cochain>, D1)>,
    cur: Vec<Cochain>,
    d: D2,
    l: u64,
    kmax: u32,
) -> Vec<u32>
where
    D1: Fn(&Cochain) -> Cochain,
    D2: Fn(&Cochain) -> Cochain,
{
    let zero_of = |c: &Cochain| c.iter().all(|e| e.iter().all(|&x| x == 0));
    let z: Vec<Cochain> = cur.into_iter().filter(|c| zero_of(&d(c))).collect();
    let b: HashSet<Cochain> = match prev {
        Some((cs, dp)) => cs.iter().map(dp).collect(),
        None => [z[0].iter().map(|_| m.zero()).collect()].into_iter().collect(),
    };
    torsion_profile(m, &z, &b, l, kmax)
}

fn tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..p {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..n).map(move |g| {
                    let mut u = t.clone();
                    u.push(g);
                    u
                })
            })
            .collect();
    }
    out
}

fn index(n: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &g| acc * n + g)
}

/// Inhomogeneous coboundary of `f: G^p → M`.
fn bar_delta(m: &ActedGroup, f: &Cochain, p: usize) -> Cochain {
    let n = m.table.len();
    tuples(n, p + 1)
        .iter()
        .map(|t| {
            let mut acc = m.act(t[0], &f[index(n, &t[1..])]);
            for i in 0..p {
                let mut u = t.clone();
                let prod = m.table[u[i]][u[i + 1]];
                u.splice(i..i + 2, [prod]);
                let v = &f[index(n, &u)];
                acc = if i % 2 == 0 { m.add(&acc, &m.neg(v)) } else { m.add(&acc, v) };
            }
            let last = &f[index(n, &t[..p])];
            if p.is_multiple_of(2) {
                m.add(&acc, &m.neg(last))
            } else {
                m.add(&acc, last)
            }
        })
        .collect()
}

/// Cohomology profile from exhaustive enumeration of bar cochains.
pub fn bar_profile(m: &ActedGroup, p: usize, l: u64, kmax: u32) -> Vec<u32> {
    let n = m.table.len();
    let cur = all_cochains(m, n.pow(p as u32));
    let prev = (p > 0).then(|| (all_cochains(m, n.pow(p as u32 - 1)), move |f: &Cochain| bar_delta(m, f, p - 1)));
    profile_of_complex(m, prev, cur, |f| bar_delta(m, f, p), l, kmax)
}

pub fn bar_feasible(m: &ActedGroup, p: usize) -> bool {
    (m.order() as f64).powi(m.table.len().pow(p as u32) as i32) <= (1u64 << 16) as f64
}

fn generator_of(table: &[Vec<usize>]) -> Option<usize> {
    let n = table.len();
    (0..n).find(|&g| {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = table[x][g];
            k += 1;
        }
        k == n
    })
}

/// Cohomology of a cyclic group from the periodic resolution:
/// `M →(t−1) M →N M →(t−1) M`.
pub fn cyclic_profile(m: &ActedGroup, p: usize, l: u64, kmax: u32) -> Vec<u32> {
    let n = m.table.len();
    let t = generator_of(&m.table).expect("cyclic group");
    let diff = move |k: usize, c: &Cochain| -> Cochain {
        let x = &c[0];
        let y = if k.is_multiple_of(2) {
            m.add(&m.act(t, x), &m.neg(x))
        } else {
            (0..n).fold(m.zero(), |acc, g| m.add(&acc, &m.act(g, x)))
        };
        vec![y]
    };
    let cur = all_cochains(m, 1);
    let prev = (p > 0).then(|| (all_cochains(m, 1), move |c: &Cochain| diff(p - 1, c)));
    profile_of_complex(m, prev, cur, |c| diff(p, c), l, kmax)
}

/// Cohomology of `Z/2 × Z/2` (elements as bit pairs) from the tensor product
/// of two periodic resolutions: `C^n = M^{n+1}` indexed by `(i, n−i)`.
pub fn klein_profile(m: &ActedGroup, p: usize, l: u64, kmax: u32) -> Vec<u32> {
    let (s, t) = (1usize, 2usize);
    let eps = move |g: usize, k: usize, x: &Elem| -> Elem {
        if k.is_multiple_of(2) {
            m.add(&m.act(g, x), &m.neg(x))
        } else {
            m.add(&m.act(g, x), x)
        }
    };
    let diff = move |n: usize, c: &Cochain| -> Cochain {
        (0..=n + 1)
            .map(|i| {
                let j = n + 1 - i;
                let mut acc = m.zero();
                if i >= 1 {
                    acc = m.add(&acc, &eps(s, i - 1, &c[i - 1]));
                }
                if j >= 1 {
                    let v = eps(t, j - 1, &c[i]);
                    acc = if i % 2 == 0 { m.add(&acc, &v) } else { m.add(&acc, &m.neg(&v)) };
                }
                acc
            })
            .collect()
    };
    let cur = all_cochains(m, p + 1);
    let prev = (p > 0).then(|| (all_cochains(m, p), move |c: &Cochain| diff(p - 1, c)));
    profile_of_complex(m, prev, cur, |c| diff(p, c), l, kmax)
}

/// Best available oracle: bar enumeration when small enough, otherwise a
/// small resolution.
pub fn oracle_profile(m: &ActedGroup, p: usize, l: u64, kmax: u32) -> (Vec<u32>, &'static str) {
    if bar_feasible(m, p) {
        (bar_profile(m, p, l, kmax), "bar")
    } else if m.table.len() == 4 && (0..4).all(|g| m.table[g][g] == 0) {
        (klein_profile(m, p, l, kmax), "klein")
    } else {
        (cyclic_profile(m, p, l, kmax), "cyclic")
    }
}

/// Simplicial cochain cohomology of a complex given by all its faces
/// (sorted vertex lists), over `Z/n`, by enumeration. Returns `|H^q|`.
pub fn simplicial_cohomology_order(faces: &[Vec<usize>], q: usize, n: u64) -> u64 {
    let of_dim = |d: usize| -> Vec<&Vec<usize>> { faces.iter().filter(|f| f.len() == d + 1).collect() };
    let cq = of_dim(q);
    let cnext = of_dim(q + 1);
    let cprev = if q == 0 { vec![] } else { of_dim(q - 1) };
    let coboundary = |from: &[&Vec<usize>], to: &[&Vec<usize>], f: &[u64]| -> Vec<u64> {
        to.iter()
            .map(|t| {
                (0..t.len()).fold(0u64, |acc, i| {
                    let mut face = (*t).clone();
                    face.remove(i);
                    let k = from.iter().position(|x| **x == face).expect("closed under faces");
                    let v = if i % 2 == 0 { f[k] } else { (n - f[k]) % n };
                    (acc + v) % n
                })
            })
            .collect()
    };
    let enumerate = |len: usize| -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u64>| {
                    (0..n).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    };
    let z = enumerate(cq.len()).into_iter().filter(|f| coboundary(&cq, &cnext, f).iter().all(|&x| x == 0)).count() as u64;
    let b: HashSet<Vec<u64>> = if q == 0 {
        [vec![0; cq.len()]].into_iter().collect()
    } else {
        enumerate(cprev.len()).iter().map(|f| coboundary(&cprev, &cq, f)).collect()
    };
    z / b.len() as u64
}
