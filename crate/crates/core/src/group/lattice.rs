use super::{unzigzag, zigzag, Group, GroupElement, GroupKind};
use crate::error::{Error, Result};

/// The free abelian group Z^d with the standard generators ±e_i.
#[derive(Debug, Clone)]
pub struct IntegerLattice {
    dim: usize,
    generators: Vec<GroupElement>,
}

impl IntegerLattice {
    pub fn new(dim: usize) -> Self {
        let mut generators = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for sign in [1i64, -1] {
                let mut v = vec![0i64; dim];
                v[i] = sign;
                generators.push(Self::encode(&v));
            }
        }
        IntegerLattice { dim, generators }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn encode(v: &[i64]) -> GroupElement {
        GroupElement::from_encoding(v.iter().map(|&x| zigzag(x)).collect())
    }

    pub fn decode(g: &GroupElement) -> Vec<i64> {
        g.encoding().iter().map(|&x| unzigzag(x)).collect()
    }
}

impl Group for IntegerLattice {
    fn label(&self) -> String {
        format!("zd({})", self.dim)
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Lattice { dim: self.dim }
    }

    fn identity(&self) -> GroupElement {
        Self::encode(&vec![0; self.dim])
    }

    fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let v: Vec<i64> = Self::decode(a)
            .into_iter()
            .zip(Self::decode(b))
            .map(|(x, y)| x + y)
            .collect();
        Self::encode(&v)
    }

    fn invert(&self, g: &GroupElement) -> GroupElement {
        let v: Vec<i64> = Self::decode(g).into_iter().map(|x| -x).collect();
        Self::encode(&v)
    }

    fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn word_length_hint(&self, g: &GroupElement) -> Option<u64> {
        Some(Self::decode(g).iter().map(|x| x.unsigned_abs()).sum())
    }

    fn coordinates(&self, g: &GroupElement) -> Option<Vec<i64>> {
        Some(Self::decode(g))
    }

    fn format_element(&self, g: &GroupElement) -> String {
        Self::decode(g)
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let v = text
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad coordinate {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if v.len() != self.dim {
            return Err(Error::Parse(format!(
                "expected {} coordinates for {}, got {:?}",
                self.dim,
                self.label(),
                text
            )));
        }
        Ok(Self::encode(&v))
    }
}
