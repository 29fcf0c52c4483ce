//! Voxelwise boolean operations on octrees sharing one domain.

use alloc::boxed::Box;

use super::{Node, Octree, OctreeError};

fn zip_children(a: &[Node; 8], b: &[Node; 8], f: impl Fn(&Node, &Node) -> Node) -> Node {
    Node::canonical(core::array::from_fn(|i| f(&a[i], &b[i])))
}

fn merge_nodes(a: &Node, b: &Node) -> Node {
    match (a, b) {
        (Node::Full, _) | (_, Node::Full) => Node::Full,
        (Node::Empty, x) | (x, Node::Empty) => x.clone(),
        (Node::Branch(ca), Node::Branch(cb)) => zip_children(ca, cb, merge_nodes),
    }
}

fn intersect_nodes(a: &Node, b: &Node) -> Node {
    match (a, b) {
        (Node::Empty, _) | (_, Node::Empty) => Node::Empty,
        (Node::Full, x) | (x, Node::Full) => x.clone(),
        (Node::Branch(ca), Node::Branch(cb)) => zip_children(ca, cb, intersect_nodes),
    }
}

fn subtract_nodes(a: &Node, b: &Node) -> Node {
    match (a, b) {
        (Node::Empty, _) | (_, Node::Full) => Node::Empty,
        (x, Node::Empty) => x.clone(),
        (Node::Full, Node::Branch(cb)) => complement_node_children(cb),
        (Node::Branch(ca), Node::Branch(cb)) => zip_children(ca, cb, subtract_nodes),
    }
}

fn complement_node(n: &Node) -> Node {
    match n {
        Node::Empty => Node::Full,
        Node::Full => Node::Empty,
        Node::Branch(ch) => complement_node_children(ch),
    }
}

fn complement_node_children(ch: &[Node; 8]) -> Node {
    // The complement of a canonical branch is never uniform.
    Node::Branch(Box::new(core::array::from_fn(|i| complement_node(&ch[i]))))
}

impl Octree {
    /// Voxelwise `self OR other`.
    pub fn merge(&self, other: &Octree) -> Result<Octree, OctreeError> {
        self.check_domain(other)?;
        Ok(Octree::from_root(*self.domain(), merge_nodes(self.root(), other.root())))
    }

    /// Voxelwise `self AND NOT other`.
    pub fn subtract(&self, other: &Octree) -> Result<Octree, OctreeError> {
        self.check_domain(other)?;
        Ok(Octree::from_root(*self.domain(), subtract_nodes(self.root(), other.root())))
    }

    /// Voxelwise `self AND other`.
    pub fn intersect(&self, other: &Octree) -> Result<Octree, OctreeError> {
        self.check_domain(other)?;
        Ok(Octree::from_root(*self.domain(), intersect_nodes(self.root(), other.root())))
    }

    /// Intersection through subtraction only: `self − (self − other)`.
    pub fn intersect_by_subtraction(&self, other: &Octree) -> Result<Octree, OctreeError> {
        self.subtract(&self.subtract(other)?)
    }

    /// Every domain voxel not in `self`.
    pub fn complement(&self) -> Octree {
        Octree::from_root(*self.domain(), complement_node(self.root()))
    }
}

/// Free-function forms of the boolean operations.
pub fn merge(a: &Octree, b: &Octree) -> Result<Octree, OctreeError> {
    a.merge(b)
}

pub fn subtract(a: &Octree, b: &Octree) -> Result<Octree, OctreeError> {
    a.subtract(b)
}

pub fn intersect(a: &Octree, b: &Octree) -> Result<Octree, OctreeError> {
    a.intersect(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Solid, Vec3};
    use crate::octree::{voxelize, VoxelDomain};
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn domain() -> VoxelDomain {
        VoxelDomain::centered(Vec3::ZERO, 2.0, 5).unwrap()
    }

    fn random_solid(rng: &mut ChaCha8Rng) -> Solid {
        let p = Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if rng.gen_bool(0.5) {
            Solid::sphere(p, rng.gen_range(0.05..0.45)).unwrap()
        } else {
            let axis = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let axis = axis.try_normalize().unwrap_or(Vec3::Z);
            Solid::cone(p, axis, rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.45)).unwrap()
        }
    }

    fn bits(t: &Octree) -> Vec<bool> {
        let n = t.domain().resolution();
        let mut out = Vec::with_capacity((n * n * n) as usize);
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    out.push(t.contains_voxel(ix, iy, iz));
                }
            }
        }
        out
    }

    #[test]
    fn identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = voxelize(&random_solid(&mut rng), &domain()).unwrap();
        let empty = Octree::empty(domain());
        assert!(a.subtract(&a).unwrap().is_empty());
        assert_eq!(a.subtract(&empty).unwrap(), a);
        assert_eq!(a.merge(&empty).unwrap(), a);
        assert_eq!(a.merge(&a).unwrap(), a);
        assert_eq!(a.intersect(&a).unwrap(), a);
        assert!(a.intersect(&empty).unwrap().is_empty());
        assert_eq!(a.complement().complement(), a);
        assert_eq!(merge(&a, &a.complement()).unwrap(), Octree::full(domain()));
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let a = Octree::empty(domain());
        let b = Octree::empty(VoxelDomain::centered(Vec3::ZERO, 2.0, 6).unwrap());
        assert_eq!(a.merge(&b), Err(OctreeError::DomainMismatch));
        assert_eq!(subtract(&a, &b), Err(OctreeError::DomainMismatch));
        assert_eq!(intersect(&a, &b), Err(OctreeError::DomainMismatch));
    }

    #[test]
    fn boolean_algebra_against_bitsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let a = voxelize(&random_solid(&mut rng), &domain()).unwrap();
            let b = voxelize(&random_solid(&mut rng), &domain()).unwrap();
            let (ba, bb) = (bits(&a), bits(&b));
            let m = a.merge(&b).unwrap();
            let s = a.subtract(&b).unwrap();
            let i = a.intersect(&b).unwrap();
            for t in [&m, &s, &i] {
                assert!(t.is_canonical());
            }
            let (bm, bs, bi) = (bits(&m), bits(&s), bits(&i));
            for k in 0..ba.len() {
                assert_eq!(bm[k], ba[k] || bb[k]);
                assert_eq!(bs[k], ba[k] && !bb[k]);
                assert_eq!(bi[k], ba[k] && bb[k]);
            }
            // Commutativity, De Morgan, inclusion-exclusion, dual routes.
            assert_eq!(m, b.merge(&a).unwrap());
            assert_eq!(i, b.intersect(&a).unwrap());
            assert_eq!(m.complement(), a.complement().intersect(&b.complement()).unwrap());
            assert_eq!(m.voxel_count() + i.voxel_count(), a.voxel_count() + b.voxel_count());
            assert_eq!(a.voxel_count() - s.voxel_count(), i.voxel_count());
            assert_eq!(i, a.intersect_by_subtraction(&b).unwrap());
        }
    }
}
