//! Planar array geometry: element positions, poses and aspect angles.
//!
//! Arrays are regular rectangular grids centered on their pose origin and
//! laid out on the pose's u-v plane. Indexing is 1-based, matching the
//! row/column convention of the unit-cell grid; storage order is row-major.

use crate::error::{Result, SimError};

const ORTHO_TOL: f64 = 1e-12;

/// Position or free vector in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, rhs: Vec3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn cross(self, rhs: Vec3) -> Vec3 {
        Vec3::new(
            self.y * rhs.z - self.z * rhs.y,
            self.z * rhs.x - self.x * rhs.z,
            self.x * rhs.y - self.y * rhs.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(self) -> Result<Vec3> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(SimError::DegenerateGeometry(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Position and orientation of a planar aperture.
///
/// `boresight`, `u` and `v` form a right-handed orthonormal triad; the
/// aperture lies in the u-v plane and radiates toward `boresight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub origin: Vec3,
    pub u: Vec3,
    pub v: Vec3,
    pub boresight: Vec3,
}

impl Pose {
    /// Validates orthonormality before constructing.
    pub fn new(origin: Vec3, u: Vec3, v: Vec3, boresight: Vec3) -> Result<Self> {
        if !origin.is_finite() {
            return Err(SimError::InvalidGeometry("pose origin must be finite".into()));
        }
        for (name, a) in [("u", u), ("v", v), ("boresight", boresight)] {
            if (a.norm() - 1.0).abs() > ORTHO_TOL {
                return Err(SimError::InvalidGeometry(format!(
                    "pose axis {name} is not a unit vector (norm {})",
                    a.norm()
                )));
            }
        }
        for (pair, d) in [
            ("u.v", u.dot(v)),
            ("u.boresight", u.dot(boresight)),
            ("v.boresight", v.dot(boresight)),
        ] {
            if d.abs() > ORTHO_TOL {
                return Err(SimError::InvalidGeometry(format!(
                    "pose axes {pair} are not orthogonal (dot {d:e})"
                )));
            }
        }
        Ok(Self { origin, u, v, boresight })
    }

    /// Pose at the world origin facing +z, with u = +x and v = +y.
    pub fn identity() -> Self {
        Self {
            origin: Vec3::ZERO,
            u: Vec3::new(1.0, 0.0, 0.0),
            v: Vec3::new(0.0, 1.0, 0.0),
            boresight: Vec3::new(0.0, 0.0, 1.0),
        }
    }

    /// Pose at `origin` with the boresight aimed at `target`.
    ///
    /// The in-plane axes are built deterministically: u is chosen orthogonal
    /// to the boresight and to world +y (falling back to +x for near-vertical
    /// boresights), and v completes the right-handed triad.
    pub fn facing(origin: Vec3, target: Vec3) -> Result<Self> {
        let w = (target - origin).normalized().map_err(|_| {
            SimError::DegenerateGeometry("pose target coincides with its origin".into())
        })?;
        let mut refv = Vec3::new(0.0, 1.0, 0.0);
        if refv.dot(w).abs() > 0.9 {
            refv = Vec3::new(1.0, 0.0, 0.0);
        }
        let u = refv.cross(w).normalized()?;
        let v = w.cross(u).normalized()?;
        Pose::new(origin, u, v, w)
    }
}

/// Regular rectangular grid of antenna/RIS elements centered on its pose.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarArray {
    rows: usize,
    cols: usize,
    dx: f64,
    dy: f64,
    pose: Pose,
}

impl PlanarArray {
    /// Builds an array with `rows x cols` elements at the given pitch
    /// (same spacing in both in-plane directions).
    pub fn new(rows: usize, cols: usize, spacing: f64, pose: Pose) -> Result<Self> {
        Self::with_pitch(rows, cols, spacing, spacing, pose)
    }

    pub fn with_pitch(rows: usize, cols: usize, dx: f64, dy: f64, pose: Pose) -> Result<Self> {
        if rows < 1 || cols < 1 {
            return Err(SimError::InvalidGeometry(format!(
                "array dimensions must be at least 1x1 (got {rows}x{cols})"
            )));
        }
        if !(dx > 0.0) || !(dy > 0.0) || !dx.is_finite() || !dy.is_finite() {
            return Err(SimError::InvalidGeometry(format!(
                "element spacing must be positive and finite (got dx={dx}, dy={dy})"
            )));
        }
        Ok(Self { rows, cols, dx, dy, pose })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn pose(&self) -> &Pose {
        &self.pose
    }

    pub fn element_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Per-element cell area dx*dy in m^2.
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// World position of the element in row `n`, column `m` (1-based).
    ///
    /// The grid is centered on the pose origin: column offsets run along u,
    /// row offsets along v.
    pub fn element_position(&self, n: usize, m: usize) -> Result<Vec3> {
        if n < 1 || n > self.rows || m < 1 || m > self.cols {
            return Err(SimError::IndexOutOfRange { n, m, rows: self.rows, cols: self.cols });
        }
        let du = (m as f64 - (self.cols as f64 + 1.0) / 2.0) * self.dx;
        let dv = (n as f64 - (self.rows as f64 + 1.0) / 2.0) * self.dy;
        Ok(self.pose.origin + self.pose.u.scale(du) + self.pose.v.scale(dv))
    }

    /// All element positions in row-major order (n outer, m inner).
    pub fn positions(&self) -> Vec<Vec3> {
        let mut out = Vec::with_capacity(self.element_count());
        for n in 1..=self.rows {
            for m in 1..=self.cols {
                out.push(self.element_position(n, m).expect("index in range"));
            }
        }
        out
    }
}

/// Elevation/azimuth of `target_point` as seen from `source_point` with the
/// orientation of `source_pose`.
///
/// Returns `(theta, phi)`: theta is the angle from the boresight in [0, pi],
/// phi the azimuth of the projection onto the u-v plane in [0, 2*pi).
pub fn aspect_angle(source_pose: &Pose, source_point: Vec3, target_point: Vec3) -> Result<(f64, f64)> {
    let dir = target_point - source_point;
    let n = dir.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(SimError::DegenerateGeometry(
            "aspect angle undefined for coincident points".into(),
        ));
    }
    let w = dir.scale(1.0 / n);
    let cos_theta = w.dot(source_pose.boresight).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let pu = w.dot(source_pose.u);
    let pv = w.dot(source_pose.v);
    let mut phi = pv.atan2(pu);
    if phi < 0.0 {
        phi += 2.0 * std::f64::consts::PI;
    }
    // atan2(0, 0) on the boresight axis yields phi = 0 by convention.
    Ok((theta, phi))
}
