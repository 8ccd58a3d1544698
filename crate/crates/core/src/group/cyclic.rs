use super::{Group, GroupElement, GroupKind};
use crate::error::{Error, Result};

/// Z/m with generators ±1, elements stored as residues in `0..m`.
#[derive(Debug, Clone)]
pub struct CyclicGroup {
    modulus: u64,
    generators: Vec<GroupElement>,
}

impl CyclicGroup {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidArgument("cyclic modulus must be positive".into()));
        }
        let mut generators = vec![GroupElement::from_encoding(vec![1 % modulus])];
        let minus = GroupElement::from_encoding(vec![(modulus - 1) % modulus]);
        if !generators.contains(&minus) {
            generators.push(minus);
        }
        Ok(CyclicGroup { modulus, generators })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn residue(g: &GroupElement) -> u64 {
        g.encoding()[0]
    }
}

impl Group for CyclicGroup {
    fn label(&self) -> String {
        format!("cyclic({})", self.modulus)
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Cyclic {
            modulus: self.modulus,
        }
    }

    fn identity(&self) -> GroupElement {
        GroupElement::from_encoding(vec![0])
    }

    fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let r = (Self::residue(a) + Self::residue(b)) % self.modulus;
        GroupElement::from_encoding(vec![r])
    }

    fn invert(&self, g: &GroupElement) -> GroupElement {
        let r = (self.modulus - Self::residue(g)) % self.modulus;
        GroupElement::from_encoding(vec![r])
    }

    fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn word_length_hint(&self, g: &GroupElement) -> Option<u64> {
        let r = Self::residue(g);
        Some(r.min(self.modulus - r))
    }

    fn order(&self) -> Option<u64> {
        Some(self.modulus)
    }

    fn format_element(&self, g: &GroupElement) -> String {
        Self::residue(g).to_string()
    }

    fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let v: i64 = text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad residue {text:?}")))?;
        let r = v.rem_euclid(self.modulus as i64) as u64;
        Ok(GroupElement::from_encoding(vec![r]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues() {
        let c = CyclicGroup::new(6).unwrap();
        let g = c.parse_element("-1").unwrap();
        assert_eq!(c.format_element(&g), "5");
        assert_eq!(c.word_length_hint(&g), Some(1));
        assert_eq!(c.multiply(&g, &c.invert(&g)), c.identity());
        // Z/2 and Z/1 have a single (or trivial) generator
        assert_eq!(CyclicGroup::new(2).unwrap().generators().len(), 1);
        assert_eq!(CyclicGroup::new(1).unwrap().generators().len(), 1);
    }
}
