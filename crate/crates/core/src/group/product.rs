use super::{Group, GroupElement, GroupKind, GroupModel};
use crate::error::{Error, Result};

/// Direct product `left × right`, generated by `(s, e) ∪ (e, s')`.
///
/// Encoding is `[len(left), left..., right...]`; text form is `left | right`.
#[derive(Debug, Clone)]
pub struct DirectProduct {
    left: GroupModel,
    right: GroupModel,
    generators: Vec<GroupElement>,
}

impl DirectProduct {
    pub fn new(left: GroupModel, right: GroupModel) -> Self {
        let mut generators = Vec::new();
        for s in left.generators() {
            generators.push(Self::join(s, &right.identity()));
        }
        for s in right.generators() {
            generators.push(Self::join(&left.identity(), s));
        }
        DirectProduct {
            left,
            right,
            generators,
        }
    }

    pub fn left(&self) -> &GroupModel {
        &self.left
    }

    pub fn right(&self) -> &GroupModel {
        &self.right
    }

    pub fn join(a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut code = Vec::with_capacity(1 + a.encoding().len() + b.encoding().len());
        code.push(a.encoding().len() as u64);
        code.extend_from_slice(a.encoding());
        code.extend_from_slice(b.encoding());
        GroupElement::from_encoding(code)
    }

    pub fn split(g: &GroupElement) -> (GroupElement, GroupElement) {
        let code = g.encoding();
        let n = code[0] as usize;
        (
            GroupElement::from_encoding(code[1..1 + n].to_vec()),
            GroupElement::from_encoding(code[1 + n..].to_vec()),
        )
    }
}

impl Group for DirectProduct {
    fn label(&self) -> String {
        format!("product({}, {})", self.left.label(), self.right.label())
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Product
    }

    fn identity(&self) -> GroupElement {
        Self::join(&self.left.identity(), &self.right.identity())
    }

    fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let (a1, a2) = Self::split(a);
        let (b1, b2) = Self::split(b);
        Self::join(&self.left.multiply(&a1, &b1), &self.right.multiply(&a2, &b2))
    }

    fn invert(&self, g: &GroupElement) -> GroupElement {
        let (g1, g2) = Self::split(g);
        Self::join(&self.left.invert(&g1), &self.right.invert(&g2))
    }

    fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn word_length_hint(&self, g: &GroupElement) -> Option<u64> {
        let (g1, g2) = Self::split(g);
        Some(self.left.word_length_hint(&g1)? + self.right.word_length_hint(&g2)?)
    }

    fn order(&self) -> Option<u64> {
        self.left.order()?.checked_mul(self.right.order()?)
    }

    fn format_element(&self, g: &GroupElement) -> String {
        let (g1, g2) = Self::split(g);
        format!(
            "{} | {}",
            self.left.format_element(&g1),
            self.right.format_element(&g2)
        )
    }

    fn parse_element(&self, text: &str) -> Result<GroupElement> {
        // split at the top-level bar that separates the two factors
        let depth_split = split_top_level(text, self.left_bars())
            .ok_or_else(|| Error::Parse(format!("expected `left | right`, got {text:?}")))?;
        let (l, r) = depth_split;
        Ok(Self::join(
            &self.left.parse_element(l)?,
            &self.right.parse_element(r)?,
        ))
    }
}

impl DirectProduct {
    /// Number of `|` separators used by the left factor's text form.
    fn left_bars(&self) -> usize {
        self.left.format_element(&self.left.identity()).matches('|').count()
    }
}

fn split_top_level(text: &str, skip: usize) -> Option<(&str, &str)> {
    let mut seen = 0;
    for (i, c) in text.char_indices() {
        if c == '|' {
            if seen == skip {
                return Some((&text[..i], &text[i + 1..]));
            }
            seen += 1;
        }
    }
    None
}
