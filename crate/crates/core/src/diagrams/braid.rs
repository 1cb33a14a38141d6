use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word in the Artin generators of the braid group on `strands` strands.
///
/// Letter `i > 0` is the generator sigma_i, letter `-i` its inverse. Under the
/// downward orientation used by [`braid_closure`](super::braid_closure) the
/// sign of a letter is the sign of the crossing it produces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidBraid("a braid needs at least one strand".into()));
        }
        for &w in &letters {
            if w == 0 || w.unsigned_abs() as usize >= strands {
                return Err(Error::InvalidBraid(format!(
                    "letter {w} is not a generator of B_{strands}"
                )));
            }
        }
        Ok(Self { strands, letters })
    }

    /// Word with the smallest strand count that admits every letter.
    pub fn from_letters(letters: Vec<i32>) -> Result<Self> {
        let strands = letters.iter().map(|w| w.unsigned_abs() as usize + 1).max().unwrap_or(1);
        Self::new(strands, letters)
    }

    pub fn trivial(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.letters.iter().filter(|&&w| w > 0).count()
    }

    pub fn negative_count(&self) -> usize {
        self.letters.iter().filter(|&&w| w < 0).count()
    }

    pub fn writhe(&self) -> i64 {
        self.positive_count() as i64 - self.negative_count() as i64
    }

    /// Every letter negated; its closure is the mirror image.
    pub fn mirror(&self) -> Self {
        Self { strands: self.strands, letters: self.letters.iter().map(|w| -w).collect() }
    }

    pub fn concat(&self, other: &BraidWord) -> Result<Self> {
        let strands = self.strands.max(other.strands);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::new(strands, letters)
    }

    /// Position in the word of the crossing `(generator, occurrence)`, where
    /// occurrences of a generator are counted from the top starting at 1.
    pub fn crossing_index(&self, generator: usize, occurrence: usize) -> Option<usize> {
        if occurrence == 0 {
            return None;
        }
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, w)| w.unsigned_abs() as usize == generator)
            .nth(occurrence - 1)
            .map(|(k, _)| k)
    }

    /// Permutation of strand positions induced by the word: `perm[x]` is the
    /// bottom position reached by the strand entering at top position `x`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for &w in &self.letters {
            let i = w.unsigned_abs() as usize - 1;
            at.swap(i, i + 1);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            perm[strand] = pos;
        }
        perm
    }

    /// Number of components of the closure (cycles of the permutation).
    pub fn closure_components(&self) -> usize {
        let perm = self.permutation();
        let mut seen = vec![false; self.strands];
        let mut cycles = 0;
        for start in 0..self.strands {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = perm[x];
            }
        }
        cycles
    }
}

/// `(sigma_1 ... sigma_{p-1})^q`, whose closure is the torus link `T(p, q)`.
pub fn torus_braid(p: i64, q: i64) -> Result<BraidWord> {
    if p < 1 || q < 0 {
        return Err(Error::InvalidParameters(format!("torus braid needs p >= 1, q >= 0; got ({p}, {q})")));
    }
    let p = p as usize;
    let block: Vec<i32> = (1..p as i32).collect();
    let letters = block.iter().copied().cycle().take(block.len() * q as usize).collect();
    BraidWord::new(p, letters)
}

/// The `p`-strand cable of one generator: the ribbon of strands
/// `(i-1)p+1..ip` crossing the ribbon to its right. All `p^2` letters carry the
/// sign of `letter`.
pub(crate) fn cabled_letter(letter: i32, p: usize) -> Vec<i32> {
    let sign = letter.signum();
    let base = (letter.unsigned_abs() as usize - 1) * p;
    let mut out = Vec::with_capacity(p * p);
    for r in 0..p {
        for g in (base + 1 + r..=base + p + r).rev() {
            out.push(sign * g as i32);
        }
    }
    out
}

/// Braid on `p * strands` strands obtained by replacing every strand of `word`
/// with `p` parallel copies (blackboard framing).
pub fn parallel_cable(word: &BraidWord, p: usize) -> Result<BraidWord> {
    if p == 0 {
        return Err(Error::InvalidParameters("cable needs p >= 1".into()));
    }
    let letters = word.letters.iter().flat_map(|&w| cabled_letter(w, p)).collect();
    BraidWord::new(word.strands * p, letters)
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for w in &self.letters {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{w}")?;
            first = false;
        }
        Ok(())
    }
}

/// Parses the whitespace separated text form, e.g. `"1 1 -2"`. The strand
/// count is the smallest one admitting every letter.
impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i32>().map_err(|_| Error::InvalidBraid(format!("cannot parse letter `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        BraidWord::from_letters(letters)
    }
}
