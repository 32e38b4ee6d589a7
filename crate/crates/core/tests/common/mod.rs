//! Brute-force oracles written against the definitions only, for actions of
//! one-generator groups (finite cyclic or the integers).

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbitlab::{Action, FiniteMetricSpace, GroupModel, Rational};

pub fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn power(p: &[usize], m: i64) -> Vec<usize> {
    let n = p.len();
    let mut inv = vec![0; n];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    let step = if m >= 0 { p.to_vec() } else { inv };
    let mut out: Vec<usize> = (0..n).collect();
    for _ in 0..m.unsigned_abs() {
        out = out.iter().map(|&x| step[x]).collect();
    }
    out
}

/// Exponents of the generator in the ball of radius `radius`.
pub fn ball(group: GroupModel, radius: usize) -> Vec<i64> {
    let r = radius as i64;
    match group {
        GroupModel::Cyclic { n } => {
            let n = n as i64;
            (-r..=r)
                .map(|m| m.rem_euclid(n))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        }
        GroupModel::Integers => (-r..=r).collect(),
        _ => panic!("oracle handles one-generator groups only"),
    }
}

pub fn satisfies_relations(group: GroupModel, p: &[usize]) -> bool {
    match group {
        GroupModel::Cyclic { n } => power(p, n as i64).iter().enumerate().all(|(i, &v)| i == v),
        GroupModel::Integers => true,
        _ => panic!("oracle handles one-generator groups only"),
    }
}

pub fn gen(a: &Action) -> Vec<usize> {
    a.gen_images().remove(0)
}

/// All generator images `q` with `max_{m in ball, x} d(p^m x, q^m x) <= delta`.
pub fn family(
    space: &FiniteMetricSpace,
    group: GroupModel,
    base: &[usize],
    delta: &Rational,
    radius: usize,
) -> BTreeSet<Vec<usize>> {
    let b = ball(group, radius);
    all_perms(base.len())
        .into_iter()
        .filter(|q| satisfies_relations(group, q))
        .filter(|q| {
            b.iter().all(|&m| {
                let (pm, qm) = (power(base, m), power(q, m));
                (0..base.len()).all(|x| space.dist(pm[x], qm[x]) <= delta)
            })
        })
        .collect()
}

pub fn gamma(
    space: &FiniteMetricSpace,
    group: GroupModel,
    p: &[usize],
    q: &[usize],
    x: usize,
    eps: &Rational,
    radius: usize,
) -> BTreeSet<usize> {
    let b = ball(group, radius);
    (0..p.len())
        .filter(|&y| b.iter().all(|&m| space.dist(power(p, m)[x], power(q, m)[y]) <= eps))
        .collect()
}

pub fn b_set(
    space: &FiniteMetricSpace,
    group: GroupModel,
    p: &[usize],
    q: &[usize],
    eps: &Rational,
    radius: usize,
) -> BTreeSet<usize> {
    (0..p.len())
        .filter(|&x| !gamma(space, group, p, q, x, eps, radius).is_empty())
        .collect()
}

/// Points `x` whose Dirac measure gives full mass to every `B(ε, Φ, Ψ)`.
pub fn dirac_persistent(phi: &Action, eps: &Rational, delta: &Rational, radius: usize) -> BTreeSet<usize> {
    let (space, group, p) = (phi.space(), phi.group(), gen(phi));
    let fam = family(space, group, &p, delta, radius);
    (0..p.len())
        .filter(|x| fam.iter().all(|q| b_set(space, group, &p, q, eps, radius).contains(x)))
        .collect()
}

/// Shortest-path closure of random weights in {1/2, 1, 3/2, 2}.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let mut w = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(1..=4);
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if w[i][k] + w[k][j] < w[i][j] {
                    w[i][j] = w[i][k] + w[k][j];
                }
            }
        }
    }
    FiniteMetricSpace::new(
        w.iter()
            .map(|row| row.iter().map(|&v| Rational::new(v, 2)).collect())
            .collect(),
    )
    .unwrap()
}

pub struct CorpusEntry {
    pub action: Action,
    pub radius: usize,
}

/// Ten seeded metrics on 2 to 4 points, each with every valid action of
/// the cyclic groups of order 2 and 3.
pub fn corpus() -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for i in 0..10 {
        let n = 2 + i % 3;
        let space = Arc::new(random_metric(&mut rng, n));
        for k in [2u32, 3] {
            let group = GroupModel::Cyclic { n: k };
            for p in all_perms(n).into_iter().filter(|p| satisfies_relations(group, p)) {
                let action = Action::new(space.clone(), group, vec![p]).unwrap();
                let radius = orbitlab::action::saturating_radius(group, n);
                out.push(CorpusEntry { action, radius });
            }
        }
    }
    out
}
