//! Octree volumetry: voxelize solids (Ω), count occupied volume (Λ), and
//! combine trees with voxelwise boolean operations.
//!
//! A leaf voxel at `max_depth` is occupied iff its center lies inside the
//! solid. Trees are kept in canonical form: no branch has eight `Full` or
//! eight `Empty` children, so structurally equal trees are equal sets.

mod codec;
mod discs;
mod ops;
mod voxelize;

use alloc::boxed::Box;

use thiserror::Error;

use crate::geom::{Aabb, Vec3};

pub use discs::{disc_decimate, voxelize_discs, Disc};
pub use ops::{intersect, merge, subtract};
pub use voxelize::{voxelize, voxelize_region, voxelize_with, VoxelizeOptions};

/// Deepest supported tree.
pub const MAX_SUPPORTED_DEPTH: u8 = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OctreeError {
    #[error("invalid voxel domain: edge {edge_length} m, depth {max_depth}")]
    Domain { edge_length: f64, max_depth: u8 },
    #[error("solid bounding box {bbox:?} exceeds the voxel domain {domain:?}")]
    SolidExceedsDomain { bbox: Aabb, domain: Aabb },
    #[error("octrees live on different voxel domains")]
    DomainMismatch,
    #[error("disc decimation supports cones, spheres and tube shells only")]
    UnsupportedDiscSolid,
    #[error("disc spacing must be positive, got {0}")]
    DiscSpacing(f64),
    #[error("malformed octree bytes: {0}")]
    Decode(&'static str),
}

/// Cubic region of space subdivided into `2^max_depth` voxels per edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelDomain {
    origin: Vec3,
    edge_length: f64,
    max_depth: u8,
}

impl VoxelDomain {
    pub fn new(origin: Vec3, edge_length: f64, max_depth: u8) -> Result<Self, OctreeError> {
        let ok = edge_length > 0.0
            && edge_length.is_finite()
            && origin.is_finite()
            && (1..=MAX_SUPPORTED_DEPTH).contains(&max_depth);
        if ok {
            Ok(Self { origin, edge_length, max_depth })
        } else {
            Err(OctreeError::Domain { edge_length, max_depth })
        }
    }

    /// A cube of the given edge centered on `center`.
    pub fn centered(center: Vec3, edge_length: f64, max_depth: u8) -> Result<Self, OctreeError> {
        let h = edge_length / 2.0;
        Self::new(center - Vec3::new(h, h, h), edge_length, max_depth)
    }

    /// Smallest centered cube whose voxels have edge `voxel_size` and that
    /// spans at least `min_edge`.
    pub fn with_voxel_size(center: Vec3, voxel_size: f64, min_edge: f64) -> Result<Self, OctreeError> {
        let mut depth = 1u8;
        while voxel_size * f64::from(1u32 << depth) < min_edge && depth < MAX_SUPPORTED_DEPTH {
            depth += 1;
        }
        Self::centered(center, voxel_size * f64::from(1u32 << depth), depth)
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn edge_length(&self) -> f64 {
        self.edge_length
    }

    pub fn max_depth(&self) -> u8 {
        self.max_depth
    }

    /// Voxels per edge, `2^max_depth`.
    pub fn resolution(&self) -> u32 {
        1 << self.max_depth
    }

    /// Leaf voxel edge `l_voxel = edge_length / 2^max_depth`.
    pub fn voxel_size(&self) -> f64 {
        self.edge_length / f64::from(self.resolution())
    }

    pub fn voxel_volume(&self) -> f64 {
        let l = self.voxel_size();
        l * l * l
    }

    pub fn bounds(&self) -> Aabb {
        let e = self.edge_length;
        Aabb::new(self.origin, self.origin + Vec3::new(e, e, e))
    }

    /// Center of leaf voxel `(ix, iy, iz)`.
    pub fn voxel_center(&self, ix: u32, iy: u32, iz: u32) -> Vec3 {
        let l = self.voxel_size();
        self.origin
            + Vec3::new(
                (f64::from(ix) + 0.5) * l,
                (f64::from(iy) + 0.5) * l,
                (f64::from(iz) + 0.5) * l,
            )
    }

    pub fn volume(&self) -> f64 {
        self.edge_length * self.edge_length * self.edge_length
    }
}

/// One octree node. Child `i` covers the octant with `x` offset bit `i & 1`,
/// `y` offset bit `i & 2` and `z` offset bit `i & 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Empty,
    Full,
    Branch(Box<[Node; 8]>),
}

impl Node {
    /// Collapses uniform children into a single leaf.
    pub(crate) fn canonical(children: [Node; 8]) -> Node {
        if children.iter().all(|c| *c == Node::Full) {
            Node::Full
        } else if children.iter().all(|c| *c == Node::Empty) {
            Node::Empty
        } else {
            Node::Branch(Box::new(children))
        }
    }

    fn voxel_count(&self, levels_below: u32) -> u64 {
        match self {
            Node::Empty => 0,
            Node::Full => 1u64 << (3 * levels_below),
            Node::Branch(ch) => ch.iter().map(|c| c.voxel_count(levels_below - 1)).sum(),
        }
    }

    fn node_count(&self) -> usize {
        match self {
            Node::Branch(ch) => 1 + ch.iter().map(Node::node_count).sum::<usize>(),
            _ => 1,
        }
    }

    fn is_canonical(&self, levels_below: u32) -> bool {
        match self {
            Node::Branch(ch) => {
                levels_below > 0
                    && !ch.iter().all(|c| *c == Node::Full)
                    && !ch.iter().all(|c| *c == Node::Empty)
                    && ch.iter().all(|c| c.is_canonical(levels_below - 1))
            }
            _ => true,
        }
    }
}

/// Occupancy octree over a [`VoxelDomain`].
#[derive(Debug, Clone, PartialEq)]
pub struct Octree {
    domain: VoxelDomain,
    root: Node,
}

impl Octree {
    pub fn empty(domain: VoxelDomain) -> Self {
        Self { domain, root: Node::Empty }
    }

    pub fn full(domain: VoxelDomain) -> Self {
        Self { domain, root: Node::Full }
    }

    pub(crate) fn from_root(domain: VoxelDomain, root: Node) -> Self {
        Self { domain, root }
    }

    pub fn domain(&self) -> &VoxelDomain {
        &self.domain
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Number of occupied leaf voxels; a `Full` node at depth `d` counts
    /// `8^(max_depth - d)`.
    pub fn voxel_count(&self) -> u64 {
        self.root.voxel_count(u32::from(self.domain.max_depth))
    }

    /// Λ: occupied volume in m³, `voxel_count × l_voxel³`.
    pub fn volume(&self) -> f64 {
        self.voxel_count() as f64 * self.domain.voxel_volume()
    }

    pub fn is_empty(&self) -> bool {
        self.root == Node::Empty
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn is_canonical(&self) -> bool {
        self.root.is_canonical(u32::from(self.domain.max_depth))
    }

    /// Occupancy of leaf voxel `(ix, iy, iz)`, each in `0..resolution`.
    pub fn contains_voxel(&self, ix: u32, iy: u32, iz: u32) -> bool {
        let mut node = &self.root;
        let mut level = u32::from(self.domain.max_depth);
        loop {
            match node {
                Node::Empty => return false,
                Node::Full => return true,
                Node::Branch(ch) => {
                    level -= 1;
                    let idx = ((ix >> level) & 1) | (((iy >> level) & 1) << 1) | (((iz >> level) & 1) << 2);
                    node = &ch[idx as usize];
                }
            }
        }
    }

    pub fn check_domain(&self, other: &Octree) -> Result<(), OctreeError> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(OctreeError::DomainMismatch)
        }
    }
}
