//! Disc decimation: an alternative voxelization front end that slices a
//! solid into cross-sectional discs spaced one voxel apart and voxelizes
//! the stack of thin slabs.

use alloc::vec::Vec;

use super::{voxelize_region, Octree, OctreeError, VoxelDomain, VoxelizeOptions};
use crate::geom::{Aabb, BallClass, Region, Solid, Vec3};
use crate::math;

/// Cross-section at one station; an annulus when `inner_radius > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Vec3,
    pub normal: Vec3,
    pub radius: f64,
    pub inner_radius: f64,
}

fn station_count(length: f64, spacing: f64) -> usize {
    math::floor(length / spacing + 1e-9) as usize + 1
}

/// Cross-sections of a cone, sphere or tube shell every `spacing` meters
/// along its axis or centerline.
pub fn disc_decimate(solid: &Solid, spacing: f64) -> Result<Vec<Disc>, OctreeError> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(OctreeError::DiscSpacing(spacing));
    }
    let discs = match solid {
        Solid::Cone(c) => {
            let tan = math::tan(c.half_angle());
            (0..station_count(c.height(), spacing))
                .map(|k| {
                    let a = k as f64 * spacing;
                    Disc { center: c.apex() + c.axis() * a, normal: c.axis(), radius: a * tan, inner_radius: 0.0 }
                })
                .collect()
        }
        Solid::Sphere(s) => (0..station_count(2.0 * s.radius, spacing))
            .map(|k| {
                let z = -s.radius + k as f64 * spacing;
                Disc {
                    center: s.center + Vec3::Z * z,
                    normal: Vec3::Z,
                    radius: math::sqrt((s.radius * s.radius - z * z).max(0.0)),
                    inner_radius: 0.0,
                }
            })
            .collect(),
        Solid::TubeShell(t) => {
            let curve = t.curve();
            let length = curve.arclength();
            (0..station_count(length, spacing))
                .map(|k| {
                    let u = (k as f64 * spacing / length).min(1.0);
                    Disc {
                        center: curve.point_at(u),
                        normal: curve.frenet_frame(u).tangent,
                        radius: t.r_outer(),
                        inner_radius: t.r_inner(),
                    }
                })
                .collect()
        }
        Solid::Union(_) => return Err(OctreeError::UnsupportedDiscSolid),
    };
    Ok(discs)
}

/// A disc thickened to a slab of `thickness` along its normal.
struct Slab {
    disc: Disc,
    half_thickness: f64,
}

impl Slab {
    /// 1-Lipschitz, non-positive exactly on the slab.
    fn field(&self, p: Vec3) -> f64 {
        let d = p - self.disc.center;
        let a = d.dot(self.disc.normal);
        let rho = math::sqrt((d.norm_squared() - a * a).max(0.0));
        let mut f = (a.abs() - self.half_thickness).max(rho - self.disc.radius);
        if self.disc.inner_radius > 0.0 {
            f = f.max(self.disc.inner_radius - rho);
        }
        f
    }
}

impl Region for Slab {
    fn contains(&self, p: Vec3) -> bool {
        self.field(p) <= 0.0
    }

    fn classify_ball(&self, center: Vec3, radius: f64) -> BallClass {
        let f = self.field(center);
        if f > radius + 1e-7 {
            BallClass::Outside
        } else if f < -radius - 1e-7 {
            BallClass::Inside
        } else {
            BallClass::Mixed
        }
    }

    fn bounding_box(&self) -> Aabb {
        let n = self.disc.normal;
        let r = self.disc.radius;
        let h = self.half_thickness;
        let ext = |c: f64| r * math::sqrt((1.0 - c * c).max(0.0)) + h * c.abs();
        let e = Vec3::new(ext(n.x), ext(n.y), ext(n.z));
        Aabb::new(self.disc.center - e, self.disc.center + e)
    }
}

/// Voxelizes a disc stack, each disc thickened to `thickness`.
pub fn voxelize_discs(discs: &[Disc], thickness: f64, domain: &VoxelDomain) -> Result<Octree, OctreeError> {
    let slabs: Vec<Slab> = discs
        .iter()
        .map(|d| Slab { disc: *d, half_thickness: thickness / 2.0 })
        .collect();
    let regions: Vec<&dyn Region> = slabs.iter().map(|s| s as &dyn Region).collect();
    voxelize_region(&regions, domain, VoxelizeOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PiecewiseBezierCurve;
    use crate::octree::voxelize;

    #[test]
    fn cone_discs_follow_similar_triangles() {
        let c = Solid::cone(Vec3::ZERO, Vec3::Z, 12.5f64.to_radians(), 1.5).unwrap();
        let d = disc_decimate(&c, 0.1).unwrap();
        assert_eq!(d.len(), 16);
        assert_eq!(d[0].radius, 0.0);
        assert!((d[15].radius - 0.3325).abs() < 1e-4);
        for (k, w) in d.windows(2).enumerate() {
            assert!(((w[1].radius - w[0].radius) - 0.1 * 12.5f64.to_radians().tan()).abs() < 1e-12, "{k}");
        }
    }

    #[test]
    fn sphere_polar_sections() {
        let s = Solid::sphere(Vec3::ZERO, 0.7).unwrap();
        let d = disc_decimate(&s, 0.7).unwrap();
        let radii: Vec<f64> = d.iter().map(|d| d.radius).collect();
        assert_eq!(radii.len(), 3);
        assert!(radii[0].abs() < 1e-12 && (radii[1] - 0.7).abs() < 1e-12 && radii[2].abs() < 1e-12);
    }

    #[test]
    fn shell_discs_are_annuli() {
        let c = PiecewiseBezierCurve::build(&[Vec3::ZERO, Vec3::Z], 0.25, 16).unwrap();
        let t = Solid::tube_shell(c, 0.15, 0.5).unwrap();
        let d = disc_decimate(&t, 0.25).unwrap();
        assert_eq!(d.len(), 5);
        assert!(d.iter().all(|d| d.radius == 0.5 && d.inner_radius == 0.15));
        assert!((d[4].center - Vec3::Z).norm() < 1e-12);
    }

    #[test]
    fn unions_and_bad_spacing_rejected() {
        let s = Solid::sphere(Vec3::ZERO, 0.7).unwrap();
        let u = Solid::union(alloc::vec![s.clone()]).unwrap();
        assert_eq!(disc_decimate(&u, 0.1), Err(OctreeError::UnsupportedDiscSolid));
        assert_eq!(disc_decimate(&s, 0.0), Err(OctreeError::DiscSpacing(0.0)));
    }

    /// With stations on voxel-center planes, every leaf center is judged by
    /// the cross-section through it, so both front ends agree closely.
    #[test]
    fn disc_stack_agrees_with_direct_voxelization() {
        let l = 0.025;
        let domain = VoxelDomain::centered(Vec3::ZERO, l * 128.0, 7).unwrap();
        // Stations sit on voxel-center planes and every slab boundary falls
        // halfway between two planes, so no leaf center is a tie.
        let apex = domain.voxel_center(64, 64, 10);
        let cone = Solid::cone(apex, Vec3::Z, 12.5f64.to_radians(), 59.5 * l).unwrap();
        let shift = Vec3::new(0.3 * l, 0.1 * l, 0.0);
        let ball = Solid::sphere(domain.voxel_center(64, 64, 64) + shift, 32.0 * l).unwrap();
        let curve = PiecewiseBezierCurve::build(
            &[domain.voxel_center(64, 64, 30) + shift, domain.voxel_center(64, 64, 90) + shift],
            0.25,
            16,
        )
        .unwrap();
        let shell = Solid::tube_shell(curve, 6.0 * l, 20.0 * l).unwrap();
        for s in [cone, ball, shell] {
            let direct = voxelize(&s, &domain).unwrap();
            let discs = disc_decimate(&s, l).unwrap();
            let stacked = voxelize_discs(&discs, l, &domain).unwrap();
            let diff = direct.voxel_count().abs_diff(stacked.voxel_count());
            assert!(diff <= 2 * discs.len() as u64, "diff {diff} voxels over {} discs ({} vs {})", discs.len(), direct.voxel_count(), stacked.voxel_count());
        }
    }
}
