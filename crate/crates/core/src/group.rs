//! Finitely generated groups with symmetric generating sets.
//!
//! Four kinds are supported: finite cyclic groups, the integers, free abelian
//! groups and free groups. Each element has a unique normal form and a
//! canonical shortest word over the generators `S ∪ S⁻¹`, which fixes the
//! enumeration order of Cayley balls: by word length, then lexicographically
//! with the letter order `s₁ < s₁⁻¹ < s₂ < s₂⁻¹ < …`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupModel {
    Cyclic { n: u32 },
    Integers,
    FreeAbelian { rank: u32 },
    Free { rank: u32 },
}

/// A generator or the inverse of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: u32,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(generator: u32) -> Letter {
        Letter {
            generator,
            inverse: false,
        }
    }

    pub fn neg(generator: u32) -> Letter {
        Letter {
            generator,
            inverse: true,
        }
    }

    fn inv(self) -> Letter {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum NormalForm {
    Residue(u32),
    Exponents(Vec<i64>),
    Word(Vec<Letter>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    group: GroupModel,
    form: NormalForm,
}

/// Relation that a generator assignment failed, with a point it moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationViolation {
    pub relation: String,
    pub point: usize,
}

impl fmt::Display for RelationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at point {}", self.relation, self.point)
    }
}

#[derive(Debug, Clone)]
pub struct CayleyBall {
    pub radius: usize,
    pub elements: Vec<GroupElement>,
    /// Set when the ball already exhausts the (finite) group.
    pub entire_group: bool,
}

impl CayleyBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elements.iter()
    }
}

impl GroupModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GroupModel::Cyclic { n } if n == 0 => Err(Error::Argument("cyclic group order must be at least 1".into())),
            GroupModel::FreeAbelian { rank } | GroupModel::Free { rank } if rank == 0 || rank > 26 => {
                Err(Error::Argument(format!("rank {rank} outside 1..=26")))
            }
            _ => Ok(()),
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            GroupModel::Cyclic { .. } | GroupModel::Integers => 1,
            GroupModel::FreeAbelian { rank } | GroupModel::Free { rank } => rank as usize,
        }
    }

    pub fn generator_name(&self, i: usize) -> String {
        if self.rank() == 1 {
            "s".to_string()
        } else {
            ((b'a' + i as u8) as char).to_string()
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        (0..self.rank()).map(|i| self.generator_name(i)).collect()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        (0..self.rank()).find(|&i| self.generator_name(i) == name)
    }

    pub fn identity(&self) -> GroupElement {
        let form = match *self {
            GroupModel::Cyclic { .. } => NormalForm::Residue(0),
            GroupModel::Integers => NormalForm::Exponents(vec![0]),
            GroupModel::FreeAbelian { rank } => NormalForm::Exponents(vec![0; rank as usize]),
            GroupModel::Free { .. } => NormalForm::Word(Vec::new()),
        };
        GroupElement { group: *self, form }
    }

    pub fn letter(&self, l: Letter) -> GroupElement {
        assert!((l.generator as usize) < self.rank(), "generator out of range");
        let form = match *self {
            GroupModel::Cyclic { n } => NormalForm::Residue(if l.inverse { (n - 1) % n } else { 1 % n }),
            GroupModel::Integers | GroupModel::FreeAbelian { .. } => {
                let mut e = vec![0; self.rank()];
                e[l.generator as usize] = if l.inverse { -1 } else { 1 };
                NormalForm::Exponents(e)
            }
            GroupModel::Free { .. } => NormalForm::Word(vec![l]),
        };
        GroupElement { group: *self, form }
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        self.letter(Letter::pos(i as u32))
    }

    /// The symmetric generating set `S`, in letter order.
    pub fn symmetric_generators(&self) -> Vec<Letter> {
        (0..self.rank() as u32)
            .flat_map(|g| [Letter::pos(g), Letter::neg(g)])
            .collect()
    }

    /// Product of letters, left to right.
    pub fn word(&self, letters: &[Letter]) -> GroupElement {
        letters
            .iter()
            .fold(self.identity(), |acc, &l| self.mul(&acc, &self.letter(l)))
    }

    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let form = match &g.form {
            NormalForm::Residue(r) => match *self {
                GroupModel::Cyclic { n } => NormalForm::Residue((n - r) % n),
                _ => unreachable!(),
            },
            NormalForm::Exponents(e) => NormalForm::Exponents(e.iter().map(|x| -x).collect()),
            NormalForm::Word(w) => NormalForm::Word(w.iter().rev().map(|l| l.inv()).collect()),
        };
        GroupElement { group: *self, form }
    }

    pub(crate) fn check(&self, g: &GroupElement) -> Result<()> {
        if g.group != *self {
            return Err(Error::Argument(format!(
                "element {g} belongs to {:?}, not {:?}",
                g.group, self
            )));
        }
        Ok(())
    }

    fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let form = match (&g.form, &h.form) {
            (NormalForm::Residue(a), NormalForm::Residue(b)) => match *self {
                GroupModel::Cyclic { n } => NormalForm::Residue(((*a as u64 + *b as u64) % n as u64) as u32),
                _ => unreachable!(),
            },
            (NormalForm::Exponents(a), NormalForm::Exponents(b)) => {
                NormalForm::Exponents(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (NormalForm::Word(a), NormalForm::Word(b)) => {
                let mut out = a.clone();
                for &l in b {
                    if out.last() == Some(&l.inv()) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                NormalForm::Word(out)
            }
            _ => unreachable!("normal forms of one group agree"),
        };
        GroupElement { group: *self, form }
    }

    /// All elements of word length at most `radius`, each once, ordered by
    /// length and then by canonical word.
    pub fn cayley_ball(&self, radius: usize) -> CayleyBall {
        let gens: Vec<GroupElement> = self
            .symmetric_generators()
            .into_iter()
            .map(|l| self.letter(l))
            .collect();
        let mut seen: BTreeSet<(usize, Vec<Letter>)> = BTreeSet::new();
        let mut all = vec![self.identity()];
        seen.insert(all[0].sort_key());
        let mut layer = vec![self.identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for g in &layer {
                for s in &gens {
                    let h = self.mul(g, s);
                    if seen.insert(h.sort_key()) {
                        next.push(h);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all.sort_by_cached_key(|g| g.sort_key());
        let entire_group = match *self {
            GroupModel::Cyclic { n } => radius >= (n / 2) as usize,
            _ => false,
        };
        CayleyBall {
            radius,
            elements: all,
            entire_group,
        }
    }

    /// Checks the defining relations on a raw generator assignment.
    ///
    /// Non-bijective maps are a structural error; a failed relation is
    /// returned as `Ok(Some(..))`.
    pub fn relations_hold(&self, assignment: &[Vec<usize>]) -> Result<Option<RelationViolation>> {
        if assignment.len() != self.rank() {
            return Err(Error::Argument(format!(
                "{} generator maps given, group has {} generators",
                assignment.len(),
                self.rank()
            )));
        }
        let perms = assignment
            .iter()
            .enumerate()
            .map(|(i, img)| {
                Perm::from_images(img.clone()).map_err(|reason| Error::NotBijective {
                    generator: self.generator_name(i),
                    reason,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(n) = perms.first().map(Perm::len) {
            if perms.iter().any(|p| p.len() != n) {
                return Err(Error::Argument("generator maps act on different point counts".into()));
            }
        }
        Ok(self.first_violated_relation(&perms))
    }

    pub(crate) fn first_violated_relation(&self, perms: &[Perm]) -> Option<RelationViolation> {
        match *self {
            GroupModel::Cyclic { n } => {
                let p = perms[0].pow(n as u64);
                p.first_difference(&Perm::identity(p.len()))
                    .map(|point| RelationViolation {
                        relation: format!("s^{n} = e"),
                        point,
                    })
            }
            GroupModel::FreeAbelian { .. } => {
                for i in 0..perms.len() {
                    for j in i + 1..perms.len() {
                        let ab = perms[i].after(&perms[j]);
                        let ba = perms[j].after(&perms[i]);
                        if let Some(point) = ab.first_difference(&ba) {
                            return Some(RelationViolation {
                                relation: format!(
                                    "{a}{b} = {b}{a}",
                                    a = self.generator_name(i),
                                    b = self.generator_name(j)
                                ),
                                point,
                            });
                        }
                    }
                }
                None
            }
            GroupModel::Integers | GroupModel::Free { .. } => None,
        }
    }
}

impl GroupElement {
    pub fn group(&self) -> GroupModel {
        self.group
    }

    pub fn is_identity(&self) -> bool {
        match &self.form {
            NormalForm::Residue(r) => *r == 0,
            NormalForm::Exponents(e) => e.iter().all(|&x| x == 0),
            NormalForm::Word(w) => w.is_empty(),
        }
    }

    /// A shortest word over `S ∪ S⁻¹` representing this element.
    pub fn canonical_word(&self) -> Vec<Letter> {
        match &self.form {
            NormalForm::Residue(r) => {
                let n = match self.group {
                    GroupModel::Cyclic { n } => n,
                    _ => unreachable!(),
                };
                if *r <= n - r {
                    vec![Letter::pos(0); *r as usize]
                } else {
                    vec![Letter::neg(0); (n - r) as usize]
                }
            }
            NormalForm::Exponents(e) => e
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| {
                    let l = if k >= 0 {
                        Letter::pos(i as u32)
                    } else {
                        Letter::neg(i as u32)
                    };
                    std::iter::repeat(l).take(k.unsigned_abs() as usize)
                })
                .collect(),
            NormalForm::Word(w) => w.clone(),
        }
    }

    pub fn word_length(&self) -> usize {
        match &self.form {
            NormalForm::Residue(r) => match self.group {
                GroupModel::Cyclic { n } => (*r).min(n - r) as usize,
                _ => unreachable!(),
            },
            NormalForm::Exponents(e) => e.iter().map(|k| k.unsigned_abs() as usize).sum(),
            NormalForm::Word(w) => w.len(),
        }
    }

    fn sort_key(&self) -> (usize, Vec<Letter>) {
        (self.word_length(), self.canonical_word())
    }

    /// Residue for cyclic groups, exponent sum otherwise (integers only).
    pub fn as_integer(&self) -> Option<i64> {
        match (&self.form, self.group) {
            (NormalForm::Residue(r), _) => Some(*r as i64),
            (NormalForm::Exponents(e), GroupModel::Integers) => Some(e[0]),
            _ => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.canonical_word();
        if w.is_empty() {
            return f.write_str("e");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let name = self.group.generator_name(w[i].generator as usize);
            let k = (j - i) as i64 * if w[i].inverse { -1 } else { 1 };
            parts.push(if k == 1 { name } else { format!("{name}^{k}") });
            i = j;
        }
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}
