//! Text codec for portraits.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! Portrait := Perm Children?
//! Children := "[" Portrait ("," Portrait)* "]"      -- exactly d children
//! Perm     := "e" | digit-string | "(" n ("," n)* ")"
//! ```
//!
//! `e` is the identity; a digit string like `10` lists one-line images for
//! d ≤ 10; the parenthesized form covers larger degrees. A bare permutation
//! is a depth-1 portrait; children raise the depth by one. Children of
//! different depths are accepted on input, with shallower subtrees padded by
//! identity labels; formatting always emits the full uniform-depth form, so
//! `format ∘ parse` is the identity on uniform-depth text and `parse ∘
//! format` is the identity on every portrait of depth ≥ 1.

use crate::error::{Error, Result};
use crate::tree::perm::Perm;
use crate::tree::portrait::Portrait;
use crate::tree::vertex::{Degree, Vertex};

/// Parses portrait text for a known degree.
pub fn parse_portrait(text: &str, degree: Degree) -> Result<Portrait> {
    let bytes = text.as_bytes();
    let mut parser = Parser {
        bytes,
        pos: 0,
        degree,
    };
    let node = parser.portrait()?;
    parser.skip_ws();
    if parser.pos != bytes.len() {
        return Err(parser.fail("trailing input after portrait"));
    }
    Ok(node.realize(degree))
}

/// Canonical text form of a portrait. Depth-0 portraits have no text form
/// and format as `e`, which re-parses at depth 1.
pub fn format_portrait(g: &Portrait) -> String {
    let mut out = String::new();
    if g.depth() == 0 {
        return "e".to_string();
    }
    write_node(g, &Vertex::root(), g.depth(), &mut out);
    out
}

fn write_node(g: &Portrait, v: &Vertex, remaining: usize, out: &mut String) {
    let label = g.label(v).expect("internal vertex");
    out.push_str(&label.to_string());
    if remaining > 1 {
        out.push('[');
        for j in 0..g.degree().get() as u8 {
            if j > 0 {
                out.push(',');
            }
            write_node(g, &v.child(j), remaining - 1, out);
        }
        out.push(']');
    }
}

/// Parsed portrait tree before depth normalization.
struct Node {
    label: Perm,
    children: Option<Vec<Node>>,
}

impl Node {
    fn depth(&self) -> usize {
        match &self.children {
            None => 1,
            Some(ch) => 1 + ch.iter().map(Node::depth).max().unwrap_or(0),
        }
    }

    /// Builds the portrait, padding shallow subtrees with identity labels.
    fn realize(&self, degree: Degree) -> Portrait {
        let depth = self.depth();
        Portrait::from_label_fn(degree, depth, |v| self.label_at(v.letters(), degree))
    }

    fn label_at(&self, letters: &[u8], degree: Degree) -> Perm {
        match letters.split_first() {
            None => self.label.clone(),
            Some((&first, rest)) => match &self.children {
                Some(ch) => ch[first as usize].label_at(rest, degree),
                None => Perm::identity(degree.get()),
            },
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    degree: Degree,
}

impl<'a> Parser<'a> {
    fn fail(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail(&format!("expected '{}'", byte as char)))
        }
    }

    fn portrait(&mut self) -> Result<Node> {
        let label = self.perm()?;
        let children = if self.peek() == Some(b'[') {
            self.pos += 1;
            let d = self.degree.get();
            let mut children = Vec::with_capacity(d);
            children.push(self.portrait()?);
            while self.peek() == Some(b',') {
                self.pos += 1;
                children.push(self.portrait()?);
            }
            self.expect(b']')?;
            if children.len() != d {
                return Err(self.fail(&format!(
                    "expected {d} children for degree {d}, got {}",
                    children.len()
                )));
            }
            Some(children)
        } else {
            None
        };
        Ok(Node { label, children })
    }

    fn perm(&mut self) -> Result<Perm> {
        let d = self.degree.get();
        match self.peek() {
            Some(b'e') => {
                self.pos += 1;
                Ok(Perm::identity(d))
            }
            Some(b'(') => {
                self.pos += 1;
                let mut images = Vec::with_capacity(d);
                images.push(self.number()?);
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    images.push(self.number()?);
                }
                self.expect(b')')?;
                self.perm_from(images)
            }
            Some(c) if c.is_ascii_digit() => {
                if d > 10 {
                    return Err(self.fail("digit-string permutations need degree <= 10"));
                }
                let mut images = Vec::with_capacity(d);
                while let Some(c) = self.bytes.get(self.pos).copied() {
                    if c.is_ascii_digit() {
                        images.push(c - b'0');
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.perm_from(images)
            }
            _ => Err(self.fail("expected a permutation ('e', digits or parenthesized list)")),
        }
    }

    fn number(&mut self) -> Result<u8> {
        self.skip_ws();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.fail("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<u8>()
            .map_err(|_| self.fail("number out of range"))
    }

    fn perm_from(&self, images: Vec<u8>) -> Result<Perm> {
        let d = self.degree.get();
        if images.len() != d {
            return Err(self.fail(&format!(
                "permutation has {} images, degree is {d}",
                images.len()
            )));
        }
        Perm::from_images(images).map_err(|e| self.fail(&e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize) -> Degree {
        Degree::new(n).unwrap()
    }

    #[test]
    fn e_parses_to_depth_one_identity() {
        let g = parse_portrait("e", d(2)).unwrap();
        assert_eq!(g.depth(), 1);
        assert!(g.is_identity());
    }

    #[test]
    fn ragged_children_pad_with_identity() {
        // Root swap, trivial at v0, swap at v1 (level-2 labels trivial).
        let g = parse_portrait("10[e,10[e,e]]", d(2)).unwrap();
        assert_eq!(g.depth(), 3);
        assert_eq!(
            g.label(&Vertex::root()).unwrap(),
            Perm::transposition(2, 0, 1)
        );
        assert!(g.label(&Vertex::from_letters(&[0])).unwrap().is_identity());
        assert_eq!(
            g.label(&Vertex::from_letters(&[1])).unwrap(),
            Perm::transposition(2, 0, 1)
        );
        assert!(g
            .label(&Vertex::from_letters(&[1, 0]))
            .unwrap()
            .is_identity());
        // Canonical form round-trips.
        let text = format_portrait(&g);
        assert_eq!(parse_portrait(&text, d(2)).unwrap(), g);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_portrait("10[ e , 01 ]", d(2)).unwrap();
        let b = parse_portrait("10[e,e]", d(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parenthesized_perms() {
        let g = parse_portrait("(1,0,2)", d(3)).unwrap();
        assert_eq!(g.depth(), 1);
        assert_eq!(
            g.label(&Vertex::root()).unwrap(),
            Perm::transposition(3, 0, 1)
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse_portrait("10[e]", d(2)) {
            Err(Error::Parse { position, .. }) => assert!(position >= 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_portrait("21", d(2)).is_err());
        assert!(parse_portrait("10[e,e]x", d(2)).is_err());
        assert!(parse_portrait("", d(2)).is_err());
        assert!(parse_portrait("102", d(2)).is_err());
    }

    #[test]
    fn format_identity_labels_as_e() {
        let g = parse_portrait("10[e,e]", d(2)).unwrap();
        assert_eq!(format_portrait(&g), "10[e,e]");
    }
}
