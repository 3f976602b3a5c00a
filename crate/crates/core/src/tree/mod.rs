//! Value-semantic algebra of finite-depth automorphisms of the d-adic tree.

mod perm;
mod portrait;
mod text;
mod vertex;

pub use perm::Perm;
pub use portrait::{KeyCodec, Portrait};
pub use text::{format_portrait, parse_portrait};
pub use vertex::{Degree, Vertex};

impl std::fmt::Display for Portrait {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", format_portrait(self))
    }
}

impl Portrait {
    /// Parses the canonical text form; see [`parse_portrait`].
    pub fn parse(text: &str, degree: Degree) -> crate::error::Result<Portrait> {
        parse_portrait(text, degree)
    }
}
