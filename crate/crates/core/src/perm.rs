use std::fmt;

use serde::Serialize;

/// A bijection of `0..n`, stored as its image array: `self.apply(x) == img[x]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Perm {
    img: Vec<usize>,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.img, f)
    }
}

impl Perm {
    /// Validates that `img` is a bijection of `0..img.len()`.
    pub fn from_images(img: Vec<usize>) -> Result<Perm, String> {
        let n = img.len();
        let mut seen = vec![false; n];
        for (x, &y) in img.iter().enumerate() {
            if y >= n {
                return Err(format!("image of {x} is {y}, outside 0..{n}"));
            }
            if seen[y] {
                return Err(format!("point {y} is hit twice"));
            }
            seen[y] = true;
        }
        Ok(Perm { img })
    }

    pub(crate) fn from_images_unchecked(img: Vec<usize>) -> Perm {
        debug_assert!(Perm::from_images(img.clone()).is_ok());
        Perm { img }
    }

    pub fn identity(n: usize) -> Perm {
        Perm { img: (0..n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut p = Perm::identity(n);
        p.img.swap(a, b);
        p
    }

    /// `x -> x + shift mod n`
    pub fn rotation(n: usize, shift: i64) -> Perm {
        let m = n as i64;
        Perm {
            img: (0..m).map(|x| (x + shift).rem_euclid(m) as usize).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.img.len()
    }

    pub fn is_empty(&self) -> bool {
        self.img.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.img[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.img
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.img.len()];
        for (x, &y) in self.img.iter().enumerate() {
            inv[y] = x;
        }
        Perm { img: inv }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn after(&self, other: &Perm) -> Perm {
        Perm {
            img: other.img.iter().map(|&y| self.img[y]).collect(),
        }
    }

    pub fn pow(&self, k: u64) -> Perm {
        let mut out = Perm::identity(self.len());
        for _ in 0..k {
            out = self.after(&out);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Smallest point moved by `self` relative to `other`.
    pub fn first_difference(&self, other: &Perm) -> Option<usize> {
        (0..self.len()).find(|&x| self.img[x] != other.img[x])
    }
}
