//! Byte format for octrees.
//!
//! ```text
//! offset  size  field
//! 0       24    origin x, y, z   (f64, little endian)
//! 24      8     edge_length      (f64, little endian)
//! 32      1     max_depth        (u8)
//! 33      ..    node tags, depth-first pre-order, 2 bits each,
//!               first tag in the two most significant bits of a byte:
//!               00 Empty, 01 Full, 10 Branch (followed by its 8 children)
//! ```
//!
//! The final byte is zero-padded. Decoding rejects trailing data, tag `11`,
//! branches below `max_depth` and non-canonical branches, so every accepted
//! byte string re-encodes to itself.

use alloc::vec::Vec;

use super::{Node, Octree, OctreeError, VoxelDomain};
use crate::geom::Vec3;

const HEADER_LEN: usize = 33;
const TAG_EMPTY: u8 = 0b00;
const TAG_FULL: u8 = 0b01;
const TAG_BRANCH: u8 = 0b10;

struct BitWriter {
    bytes: Vec<u8>,
    used: u32,
}

impl BitWriter {
    fn push(&mut self, tag: u8) {
        if self.used.is_multiple_of(4) {
            self.bytes.push(0);
        }
        let shift = 6 - 2 * (self.used % 4);
        *self.bytes.last_mut().unwrap() |= tag << shift;
        self.used += 1;
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl BitReader<'_> {
    fn next(&mut self) -> Result<u8, OctreeError> {
        let byte = *self.bytes.get(self.pos / 4).ok_or(OctreeError::Decode("truncated node stream"))?;
        let shift = 6 - 2 * (self.pos % 4);
        self.pos += 1;
        Ok((byte >> shift) & 0b11)
    }
}

fn write_node(n: &Node, w: &mut BitWriter) {
    match n {
        Node::Empty => w.push(TAG_EMPTY),
        Node::Full => w.push(TAG_FULL),
        Node::Branch(ch) => {
            w.push(TAG_BRANCH);
            ch.iter().for_each(|c| write_node(c, w));
        }
    }
}

fn read_node(r: &mut BitReader<'_>, levels_below: u8) -> Result<Node, OctreeError> {
    match r.next()? {
        TAG_EMPTY => Ok(Node::Empty),
        TAG_FULL => Ok(Node::Full),
        TAG_BRANCH => {
            if levels_below == 0 {
                return Err(OctreeError::Decode("branch below max_depth"));
            }
            let mut children: [Node; 8] = core::array::from_fn(|_| Node::Empty);
            for c in children.iter_mut() {
                *c = read_node(r, levels_below - 1)?;
            }
            match Node::canonical(children) {
                n @ Node::Branch(_) => Ok(n),
                _ => Err(OctreeError::Decode("non-canonical branch")),
            }
        }
        _ => Err(OctreeError::Decode("invalid node tag")),
    }
}

impl Octree {
    pub fn to_bytes(&self) -> Vec<u8> {
        let d = self.domain();
        let mut out = Vec::with_capacity(HEADER_LEN + self.node_count() / 4 + 1);
        for v in d.origin().to_array() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&d.edge_length().to_le_bytes());
        out.push(d.max_depth());
        let mut w = BitWriter { bytes: out, used: 0 };
        write_node(self.root(), &mut w);
        w.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Octree, OctreeError> {
        if bytes.len() < HEADER_LEN {
            return Err(OctreeError::Decode("short header"));
        }
        let f = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8-byte slice"));
        let origin = Vec3::try_new(f(0), f(8), f(16)).map_err(|_| OctreeError::Decode("non-finite origin"))?;
        let domain = VoxelDomain::new(origin, f(24), bytes[32])?;
        let body = &bytes[HEADER_LEN..];
        let mut r = BitReader { bytes: body, pos: 0 };
        let root = read_node(&mut r, domain.max_depth())?;
        if body.len() != r.pos.div_ceil(4) {
            return Err(OctreeError::Decode("trailing bytes"));
        }
        let rem = r.pos % 4;
        if rem != 0 && body[body.len() - 1] & (0xFF >> (2 * rem)) != 0 {
            return Err(OctreeError::Decode("non-zero padding"));
        }
        Ok(Octree::from_root(domain, root))
    }
}
