use super::{Group, GroupElement, GroupKind};
use crate::error::{Error, Result};

/// Free group on `rank` generators, elements stored as freely reduced words.
///
/// Letter `2i + 1` is the i-th generator and `2i + 2` its inverse; the text
/// form writes generators as `a, b, c, ...` and inverses in upper case.
#[derive(Debug, Clone)]
pub struct FreeGroup {
    rank: usize,
    generators: Vec<GroupElement>,
}

pub(crate) fn inverse_letter(x: u64) -> u64 {
    if x % 2 == 1 {
        x + 1
    } else {
        x - 1
    }
}

/// Generator index of a letter, ignoring its sign.
pub(crate) fn letter_generator(x: u64) -> usize {
    ((x - 1) / 2) as usize
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidArgument(format!(
                "free group rank must be in 1..=26, got {rank}"
            )));
        }
        let generators = (0..rank as u64)
            .flat_map(|i| [2 * i + 1, 2 * i + 2])
            .map(|x| GroupElement::from_encoding(vec![x]))
            .collect();
        Ok(FreeGroup { rank, generators })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Exponent sum of generator `index` in `g`.
    pub fn exponent_sum(&self, g: &GroupElement, index: usize) -> i64 {
        g.encoding()
            .iter()
            .filter(|&&x| letter_generator(x) == index)
            .map(|&x| if x % 2 == 1 { 1 } else { -1 })
            .sum()
    }

    fn reduce_into(word: &mut Vec<u64>, letters: impl IntoIterator<Item = u64>) {
        for x in letters {
            match word.last() {
                Some(&y) if y == inverse_letter(x) => {
                    word.pop();
                }
                _ => word.push(x),
            }
        }
    }
}

impl Group for FreeGroup {
    fn label(&self) -> String {
        format!("free({})", self.rank)
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Free { rank: self.rank }
    }

    fn identity(&self) -> GroupElement {
        GroupElement::from_encoding(Vec::new())
    }

    fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut word = a.encoding().to_vec();
        Self::reduce_into(&mut word, b.encoding().iter().copied());
        GroupElement::from_encoding(word)
    }

    fn invert(&self, g: &GroupElement) -> GroupElement {
        let word = g.encoding().iter().rev().map(|&x| inverse_letter(x)).collect();
        GroupElement::from_encoding(word)
    }

    fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn word_length_hint(&self, g: &GroupElement) -> Option<u64> {
        Some(g.encoding().len() as u64)
    }

    fn format_element(&self, g: &GroupElement) -> String {
        if g.encoding().is_empty() {
            return "e".to_string();
        }
        g.encoding()
            .iter()
            .map(|&x| {
                let c = (b'a' + letter_generator(x) as u8) as char;
                if x % 2 == 1 {
                    c
                } else {
                    c.to_ascii_uppercase()
                }
            })
            .collect()
    }

    fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let text = text.trim();
        let mut word = Vec::new();
        if text == "e" || text.is_empty() {
            return Ok(GroupElement::from_encoding(word));
        }
        let mut letters = Vec::with_capacity(text.len());
        for c in text.chars() {
            if !c.is_ascii_alphabetic() {
                return Err(Error::Parse(format!("bad letter {c:?} in word {text:?}")));
            }
            let index = (c.to_ascii_lowercase() as u8 - b'a') as u64;
            if index as usize >= self.rank {
                return Err(Error::Parse(format!(
                    "letter {c:?} out of range for {}",
                    self.label()
                )));
            }
            letters.push(if c.is_ascii_lowercase() { 2 * index + 1 } else { 2 * index + 2 });
        }
        Self::reduce_into(&mut word, letters);
        Ok(GroupElement::from_encoding(word))
    }
}
