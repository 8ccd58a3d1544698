use super::{unzigzag, zigzag, Group, GroupElement, GroupKind};
use crate::error::{Error, Result};

/// Discrete Heisenberg group of integer upper unitriangular 3x3 matrices.
///
/// An element `(x, y, z)` is the matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]`;
/// generators are the elementary matrices with `x = ±1` or `y = ±1`.
#[derive(Debug, Clone)]
pub struct HeisenbergGroup {
    generators: Vec<GroupElement>,
}

impl Default for HeisenbergGroup {
    fn default() -> Self {
        Self::new()
    }
}

impl HeisenbergGroup {
    pub fn new() -> Self {
        let generators = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]]
            .iter()
            .map(Self::encode)
            .collect();
        HeisenbergGroup { generators }
    }

    pub fn encode(m: &[i64; 3]) -> GroupElement {
        GroupElement::from_encoding(m.iter().map(|&v| zigzag(v)).collect())
    }

    pub fn decode(g: &GroupElement) -> [i64; 3] {
        let e = g.encoding();
        [unzigzag(e[0]), unzigzag(e[1]), unzigzag(e[2])]
    }
}

impl Group for HeisenbergGroup {
    fn label(&self) -> String {
        "heisenberg".to_string()
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Heisenberg
    }

    fn identity(&self) -> GroupElement {
        Self::encode(&[0, 0, 0])
    }

    fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let [x, y, z] = Self::decode(a);
        let [u, v, w] = Self::decode(b);
        Self::encode(&[x + u, y + v, z + w + x * v])
    }

    fn invert(&self, g: &GroupElement) -> GroupElement {
        let [x, y, z] = Self::decode(g);
        Self::encode(&[-x, -y, x * y - z])
    }

    fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn format_element(&self, g: &GroupElement) -> String {
        let [x, y, z] = Self::decode(g);
        format!("{x} {y} {z}")
    }

    fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let v = text
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad matrix entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match v.as_slice() {
            &[x, y, z] => Ok(Self::encode(&[x, y, z])),
            _ => Err(Error::Parse(format!(
                "heisenberg elements are written `x y z`, got {text:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_is_central() {
        let h = HeisenbergGroup::new();
        let x = h.parse_element("1 0 0").unwrap();
        let y = h.parse_element("0 1 0").unwrap();
        let xy = h.multiply(&x, &y);
        let yx = h.multiply(&y, &x);
        let comm = h.multiply(&xy, &h.invert(&yx));
        assert_eq!(h.format_element(&comm), "0 0 1");
        let g = h.parse_element("2 -3 5").unwrap();
        assert_eq!(h.multiply(&g, &h.invert(&g)), h.identity());
        assert_eq!(h.multiply(&h.invert(&g), &g), h.identity());
    }
}
