//! Text forms for groups, kernels and inclusions.
//!
//! ```text
//! group     := free(k) | zd(d) | cyclic(m) | heisenberg | product(group, group)
//! kernel    := wordlength | l1 | l2sq | power(alpha) | zero
//!            | pullback(hom, kernel) | sum(kernel, kernel) | scale(c, kernel) | table(file)
//! hom       := proj(i) | expsum(j)
//! inclusion := trivial | full | axis(i) | cyclic-free(letter)
//! ```
//!
//! The inner kernel of `pullback` is read on `zd(1)`.

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{CyclicGroup, DirectProduct, FreeGroup, GroupModel, HeisenbergGroup, IntegerLattice, Limits};
use crate::kernels::{Homomorphism, LengthKernel};
use crate::relative::CosetStructure;

/// A parsed term: a head word with optional parenthesized arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub head: String,
    pub args: Vec<Term>,
}

fn parse_error(text: &str, what: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what} in {text:?}"))
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.text[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(['(', ')', ',']).unwrap_or(rest.len());
        let head = rest[..len].trim_end().to_string();
        if head.is_empty() {
            return Err(parse_error(self.text, format!("expected a name at offset {}", self.pos)));
        }
        self.pos += len;
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(parse_error(self.text, "unbalanced parentheses")),
                }
            }
        }
        Ok(Term { head, args })
    }
}

impl Term {
    pub fn parse(text: &str) -> Result<Term> {
        let mut p = Parser { text, pos: 0 };
        let term = p.term()?;
        if p.peek().is_some() {
            return Err(parse_error(text, format!("trailing input at offset {}", p.pos)));
        }
        Ok(term)
    }

    fn is_atom(&self) -> bool {
        self.args.is_empty()
    }

    fn arity(&self, n: usize) -> Result<&[Term]> {
        if self.args.len() == n {
            Ok(&self.args)
        } else {
            Err(Error::Parse(format!(
                "{} takes {n} argument(s), got {}",
                self.head,
                self.args.len()
            )))
        }
    }

    fn number<T: std::str::FromStr>(&self) -> Result<T> {
        if !self.is_atom() {
            return Err(Error::Parse(format!("expected a number, got {}(...)", self.head)));
        }
        self.head
            .parse()
            .map_err(|_| Error::Parse(format!("expected a number, got {:?}", self.head)))
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.head)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn argument_error(e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::Parse(m),
        other => other,
    }
}

pub fn parse_group(text: &str) -> Result<GroupModel> {
    group_from_term(&Term::parse(text)?).map_err(argument_error)
}

fn group_from_term(t: &Term) -> Result<GroupModel> {
    Ok(match t.head.as_str() {
        "free" => Arc::new(FreeGroup::new(t.arity(1)?[0].number()?)?),
        "zd" => {
            let d: usize = t.arity(1)?[0].number()?;
            if d == 0 || d > 64 {
                return Err(Error::Parse(format!("zd dimension must be in 1..=64, got {d}")));
            }
            Arc::new(IntegerLattice::new(d))
        }
        "cyclic" => Arc::new(CyclicGroup::new(t.arity(1)?[0].number()?)?),
        "heisenberg" => {
            t.arity(0)?;
            Arc::new(HeisenbergGroup::new())
        }
        "product" => {
            let a = t.arity(2)?;
            Arc::new(DirectProduct::new(group_from_term(&a[0])?, group_from_term(&a[1])?))
        }
        other => return Err(Error::Parse(format!("unknown group {other:?}"))),
    })
}

/// Parses a kernel on `model`. `table(file)` paths are resolved relative to
/// `base` when given.
pub fn parse_kernel(text: &str, model: &GroupModel, limits: &Limits, base: Option<&Path>) -> Result<LengthKernel> {
    let t = Term::parse(text)?;
    kernel_from_term(&t, model, limits, base).map_err(argument_error)
}

fn letter_index(text: &str) -> Option<usize> {
    let mut chars = text.chars();
    match (chars.next(), chars.next()) {
        (Some(c @ 'a'..='z'), None) => Some(c as usize - 'a' as usize),
        _ => None,
    }
}

fn homomorphism(t: &Term) -> Result<Homomorphism> {
    let arg = &t.arity(1)?[0];
    match t.head.as_str() {
        "proj" => Ok(Homomorphism::Projection(arg.number()?)),
        "expsum" => {
            let i = letter_index(&arg.head)
                .filter(|_| arg.is_atom())
                .map_or_else(|| arg.number(), Ok)?;
            Ok(Homomorphism::ExponentSum(i))
        }
        other => Err(Error::Parse(format!("unknown homomorphism {other:?}"))),
    }
}

fn kernel_from_term(t: &Term, model: &GroupModel, limits: &Limits, base: Option<&Path>) -> Result<LengthKernel> {
    let k = match t.head.as_str() {
        "wordlength" => {
            t.arity(0)?;
            LengthKernel::word_length(model, limits)?
        }
        "l1" => {
            t.arity(0)?;
            LengthKernel::l1(model)?
        }
        "l2sq" => {
            t.arity(0)?;
            LengthKernel::l2_squared(model)?
        }
        "zero" => {
            t.arity(0)?;
            LengthKernel::zero()
        }
        "power" => LengthKernel::power(model, t.arity(1)?[0].number()?)?,
        "pullback" => {
            let a = t.arity(2)?;
            let hom = homomorphism(&a[0])?;
            let line: GroupModel = Arc::new(IntegerLattice::new(1));
            let inner = kernel_from_term(&a[1], &line, limits, base)?;
            LengthKernel::pullback(model, hom, inner)?
        }
        "sum" => {
            let a = t.arity(2)?;
            LengthKernel::sum(
                &kernel_from_term(&a[0], model, limits, base)?,
                &kernel_from_term(&a[1], model, limits, base)?,
            )
        }
        "scale" => {
            let a = t.arity(2)?;
            LengthKernel::scale(a[0].number()?, &kernel_from_term(&a[1], model, limits, base)?)?
        }
        "table" => {
            let file = &t.arity(1)?[0];
            if !file.is_atom() {
                return Err(Error::Parse(format!("table needs a file name, got {file}")));
            }
            let path = match base {
                Some(dir) => dir.join(&file.head),
                None => file.head.clone().into(),
            };
            LengthKernel::table_from_csv(model.as_ref(), &path)?
        }
        other => return Err(Error::Parse(format!("unknown kernel {other:?}"))),
    };
    Ok(k.with_label(t.to_string()))
}

pub fn parse_inclusion(text: &str, model: &GroupModel) -> Result<CosetStructure> {
    let t = Term::parse(text)?;
    let c = match t.head.as_str() {
        "trivial" => {
            t.arity(0)?;
            CosetStructure::trivial(model)
        }
        "full" => {
            t.arity(0)?;
            CosetStructure::full(model)
        }
        "axis" => CosetStructure::axis(model, t.arity(1)?[0].number()?).map_err(argument_error)?,
        "cyclic-free" => {
            let arg = &t.arity(1)?[0];
            let i = letter_index(&arg.head)
                .filter(|_| arg.is_atom())
                .ok_or_else(|| Error::Parse(format!("cyclic-free needs a generator letter, got {arg}")))?;
            CosetStructure::cyclic_free(model, i).map_err(argument_error)?
        }
        other => return Err(Error::Parse(format!("unknown inclusion {other:?}"))),
    };
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms() {
        let t = Term::parse(" pullback( proj(1) ,wordlength )").unwrap();
        assert_eq!(t.to_string(), "pullback(proj(1), wordlength)");
        assert!(Term::parse("sum(l1").is_err());
        assert!(Term::parse("l1)").is_err());
        assert!(Term::parse("").is_err());
        assert_eq!(Term::parse("table(data/abs-m.csv)").unwrap().args[0].head, "data/abs-m.csv");
    }

    #[test]
    fn groups() {
        assert_eq!(parse_group("free(2)").unwrap().label(), "free(2)");
        assert_eq!(parse_group("product(zd(1), cyclic(3))").unwrap().order(), None);
        assert_eq!(parse_group("cyclic(6)").unwrap().order(), Some(6));
        for bad in ["free(0)", "zd(x)", "heisenberg(1)", "torus(2)", "zd(0)"] {
            assert!(matches!(parse_group(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn kernels_and_inclusions() {
        let lim = Limits::default();
        let z2 = parse_group("zd(2)").unwrap();
        let k = parse_kernel("pullback(proj(1), wordlength)", &z2, &lim, None).unwrap();
        assert_eq!(k.evaluate(&IntegerLattice::encode(&[5, -3])), 3.0);
        let k = parse_kernel("scale(2, sum(l1, l2sq))", &z2, &lim, None).unwrap();
        assert_eq!(k.evaluate(&IntegerLattice::encode(&[1, 2])), 16.0);
        assert!(matches!(parse_kernel("power(-1)", &z2, &lim, None), Err(Error::Parse(_))));
        assert!(matches!(parse_kernel("nope", &z2, &lim, None), Err(Error::Parse(_))));

        let f2 = parse_group("free(2)").unwrap();
        let k = parse_kernel("pullback(expsum(b), l1)", &f2, &lim, None).unwrap();
        assert_eq!(k.evaluate(&f2.parse_element("abAbb").unwrap()), 3.0);
        let c = parse_inclusion("cyclic-free(a)", &f2).unwrap();
        assert_eq!(c.label(), "cyclic-free(a)");
        assert!(parse_inclusion("axis(0)", &f2).is_err());
        assert!(parse_inclusion("axis(1)", &z2).is_ok());
    }
}
