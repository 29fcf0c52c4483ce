//! Ω: solid → octree by recursive subdivision.
//!
//! Each node carries the primitives still undecided over its extent. A
//! primitive whose distance bound proves the node's leaf centers all inside
//! fills the node; primitives proven outside drop out. Undecided primitives
//! are sampled at the leaf voxel centers.

use alloc::vec::Vec;

use super::{Node, Octree, OctreeError, VoxelDomain};
use crate::geom::{Aabb, BallClass, Region, Solid, Vec3};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VoxelizeOptions {
    /// Settle nodes within two levels of the leaves when the 8 corners and
    /// the center all agree. Faster, but may miss thin features.
    pub early_out: bool,
}

/// Ω with exact center sampling.
pub fn voxelize(solid: &Solid, domain: &VoxelDomain) -> Result<Octree, OctreeError> {
    voxelize_with(solid, domain, VoxelizeOptions::default())
}

pub fn voxelize_with(
    solid: &Solid,
    domain: &VoxelDomain,
    options: VoxelizeOptions,
) -> Result<Octree, OctreeError> {
    let prims: Vec<&dyn Region> = solid.primitives().into_iter().map(|s| s as &dyn Region).collect();
    voxelize_region(&prims, domain, options)
}

/// Voxelizes the union of `regions`.
pub fn voxelize_region(
    regions: &[&dyn Region],
    domain: &VoxelDomain,
    options: VoxelizeOptions,
) -> Result<Octree, OctreeError> {
    let bounds = domain.bounds();
    for r in regions {
        let bbox = r.bounding_box();
        if !bounds.contains_box(&bbox) {
            return Err(OctreeError::SolidExceedsDomain { bbox, domain: bounds });
        }
    }
    let builder = Builder { regions, domain, options };
    let mut stack: Vec<u32> = (0..regions.len() as u32).collect();
    let root = builder.node(&mut stack, 0, [0, 0, 0], domain.resolution());
    Ok(Octree::from_root(*domain, root))
}

struct Builder<'a> {
    regions: &'a [&'a dyn Region],
    domain: &'a VoxelDomain,
    options: VoxelizeOptions,
}

impl Builder<'_> {
    /// `stack[start..]` holds the indices undecided for the parent node.
    /// The node spans `size` voxels per edge starting at voxel `min`.
    fn node(&self, stack: &mut Vec<u32>, start: usize, min: [u32; 3], size: u32) -> Node {
        let end = stack.len();

        if size == 1 {
            let center = self.domain.voxel_center(min[0], min[1], min[2]);
            let full = stack[start..end].iter().any(|&i| self.regions[i as usize].contains(center));
            return if full { Node::Full } else { Node::Empty };
        }

        let l = self.domain.voxel_size();
        let half_size = size / 2;
        let center = self.domain.origin()
            + Vec3::new(
                f64::from(min[0] + half_size) * l,
                f64::from(min[1] + half_size) * l,
                f64::from(min[2] + half_size) * l,
            );
        // Leaf centers of this node lie within a cube of half-edge
        // `(size - 1) l / 2`, hence within this ball.
        let radius = f64::from(size - 1) * 0.5 * l * SQRT_3;
        for k in start..end {
            let i = stack[k];
            match self.regions[i as usize].classify_ball(center, radius) {
                BallClass::Inside => {
                    stack.truncate(end);
                    return Node::Full;
                }
                BallClass::Mixed => stack.push(i),
                BallClass::Outside => {}
            }
        }
        let child_start = end;
        if stack.len() == child_start {
            return Node::Empty;
        }

        if self.options.early_out && size <= 4 {
            let half = f64::from(half_size) * l;
            if let Some(uniform) = self.probe_agreement(&stack[child_start..], center, half) {
                stack.truncate(end);
                return if uniform { Node::Full } else { Node::Empty };
            }
        }

        let children: [Node; 8] = core::array::from_fn(|c| {
            let child_min = [
                min[0] + if c & 1 == 0 { 0 } else { half_size },
                min[1] + if c & 2 == 0 { 0 } else { half_size },
                min[2] + if c & 4 == 0 { 0 } else { half_size },
            ];
            self.node(stack, child_start, child_min, half_size)
        });
        stack.truncate(end);
        Node::canonical(children)
    }

    /// Membership at the 8 corners and the center, if all nine agree.
    fn probe_agreement(&self, active: &[u32], center: Vec3, half: f64) -> Option<bool> {
        let inside = |p: Vec3| active.iter().any(|&i| self.regions[i as usize].contains(p));
        let first = inside(center);
        for c in 0..8 {
            let corner = center
                + Vec3::new(
                    if c & 1 == 0 { -half } else { half },
                    if c & 2 == 0 { -half } else { half },
                    if c & 4 == 0 { -half } else { half },
                );
            if inside(corner) != first {
                return None;
            }
        }
        Some(first)
    }
}

impl Octree {
    /// Bounding box of the occupied voxels, if any.
    pub fn occupied_bounds(&self) -> Option<Aabb> {
        fn walk(n: &Node, lo: Vec3, size: f64, acc: &mut Option<Aabb>) {
            match n {
                Node::Empty => {}
                Node::Full => {
                    let b = Aabb::new(lo, lo + Vec3::new(size, size, size));
                    *acc = Some(acc.map_or(b, |a| a.union(&b)));
                }
                Node::Branch(ch) => {
                    let h = size / 2.0;
                    for (c, child) in ch.iter().enumerate() {
                        let o = Vec3::new(
                            if c & 1 == 0 { 0.0 } else { h },
                            if c & 2 == 0 { 0.0 } else { h },
                            if c & 4 == 0 { 0.0 } else { h },
                        );
                        walk(child, lo + o, h, acc);
                    }
                }
            }
        }
        let mut acc = None;
        walk(self.root(), self.domain().origin(), self.domain().edge_length(), &mut acc);
        acc
    }
}
