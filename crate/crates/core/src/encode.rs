//! Canonical byte encoding of terms.
//!
//! The encoding is a preorder walk: every node writes a one-byte tag followed
//! by its payload and children from left to right.  Raw names are unsigned
//! LEB128 varints.  Two values encode to the same bytes exactly when they are
//! structurally equal (raw names included), which is what the sink-identity
//! tests compare.
//!
//! | value                      | bytes                                   |
//! |----------------------------|-----------------------------------------|
//! | direct `Var n`             | `0x00`, varint n                         |
//! | direct `Pair a b`          | `0x01`, a, b                             |
//! | direct `First a`           | `0x02`, a                                |
//! | direct `Second a`          | `0x03`, a                                |
//! | direct `App f x`           | `0x04`, f, x                             |
//! | direct `Lam p b`           | `0x05`, p, b                             |
//! | direct `Pi p a b`          | `0x06`, p, a, b                          |
//! | direct `Universe`          | `0x07`                                   |
//! | pattern `_`                | `0x10`                                   |
//! | pattern `Var b`            | `0x11`, varint b                         |
//! | pattern `Pair l r`         | `0x12`, l, r                             |
//! | free `Var n`               | `0x20`, varint n                         |
//! | free `Node`                | `0x21`, signature tag, children          |
//! | free scoped child          | `0x22`, varint binder, body              |
//! | free term child            | term encoding                            |
//! | de Bruijn terms            | see [`crate::oracle::DbTerm`]            |

use crate::foil::RawName;

pub trait CanonicalEncode {
    fn encode_into(&self, out: &mut Vec<u8>);

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_into(&mut out);
        out
    }
}

pub(crate) fn write_varint(out: &mut Vec<u8>, value: u64) {
    leb128::write::unsigned(out, value).expect("writing to a Vec cannot fail");
}

pub(crate) fn write_raw(out: &mut Vec<u8>, raw: RawName) {
    write_varint(out, raw.0 as u64);
}

pub(crate) fn write_str(out: &mut Vec<u8>, s: &str) {
    write_varint(out, s.len() as u64);
    out.extend_from_slice(s.as_bytes());
}
