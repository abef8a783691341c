//! Ground sets and dense-bitset subsets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// The universe `M` an oracle is defined over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(m: usize) -> Self {
        GroundSet { m, labels: None }
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::validation(format!("duplicate element label {l:?}")));
            }
        }
        Ok(GroundSet {
            m: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(i)).map(String::as_str)
    }

    pub fn empty(&self) -> Subset {
        Subset::empty(self.m)
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.m)
    }
}

/// A subset of `{0, .., ground_size - 1}` stored as a dense bitset.
///
/// Bits beyond `ground_size` in the last word are always zero, so derived
/// `Eq`/`Hash` are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    words: Vec<u64>,
    ground_size: usize,
}

impl Subset {
    pub fn empty(ground_size: usize) -> Self {
        Subset {
            words: vec![0; ground_size.div_ceil(WORD)],
            ground_size,
        }
    }

    pub fn full(ground_size: usize) -> Self {
        let mut s = Subset {
            words: vec![!0; ground_size.div_ceil(WORD)],
            ground_size,
        };
        s.trim();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(ground_size: usize, items: I) -> Result<Self> {
        let mut s = Subset::empty(ground_size);
        for i in items {
            if i >= ground_size {
                return Err(Error::contract(format!(
                    "element {i} out of range for ground set of size {ground_size}"
                )));
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Bit `i` of `mask` is element `i`. Requires `ground_size <= 64`.
    pub fn from_mask(ground_size: usize, mask: u64) -> Self {
        assert!(ground_size <= WORD, "from_mask needs ground_size <= 64");
        let mut s = Subset::empty(ground_size);
        if ground_size > 0 {
            s.words[0] = mask;
            s.trim();
        }
        s
    }

    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        let rem = self.ground_size % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.ground_size
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.ground_size && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(
            i < self.ground_size,
            "insert {i} into ground set of size {}",
            self.ground_size
        );
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        assert!(
            i < self.ground_size,
            "remove {i} from ground set of size {}",
            self.ground_size
        );
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(
            i < self.ground_size,
            "toggle {i} in ground set of size {}",
            self.ground_size
        );
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn with(&self, i: usize) -> Subset {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> Subset {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    pub fn toggled(&self, i: usize) -> Subset {
        let mut s = self.clone();
        s.toggle(i);
        s
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + b)
                }
            })
        })
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn check_same_ground(&self, other: &Subset) -> Result<()> {
        if self.ground_size != other.ground_size {
            return Err(Error::contract(format!(
                "subset ground sizes differ: {} vs {}",
                self.ground_size, other.ground_size
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Subset, op: impl Fn(u64, u64) -> u64) -> Result<Subset> {
        self.check_same_ground(other)?;
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect();
        Ok(Subset {
            words,
            ground_size: self.ground_size,
        })
    }

    pub fn union(&self, other: &Subset) -> Result<Subset> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Subset) -> Result<Subset> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Subset) -> Result<Subset> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Subset {
        let mut s = Subset {
            words: self.words.iter().map(|w| !w).collect(),
            ground_size: self.ground_size,
        };
        s.trim();
        s
    }

    pub fn is_subset_of(&self, other: &Subset) -> Result<bool> {
        self.check_same_ground(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0))
    }

    pub fn is_disjoint(&self, other: &Subset) -> Result<bool> {
        self.check_same_ground(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(&a, &b)| a & b == 0))
    }
}

#[derive(Serialize, Deserialize)]
struct SubsetRepr {
    ground_size: usize,
    members: Vec<usize>,
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SubsetRepr {
            ground_size: self.ground_size,
            members: self.members(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SubsetRepr::deserialize(deserializer)?;
        Subset::from_indices(repr.ground_size, repr.members).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}/{}", self.ground_size)
    }
}
