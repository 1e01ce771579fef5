//! Cell-centred radial meshes with geometric grading toward the tip.

use std::f64::consts::PI;

use super::{GeometryError, SurfaceProfile, TipEnd};

/// Smallest allowed ratio between the narrowest and widest cell when the
/// grading is capped. Cells beyond the graded layer are uniform.
pub const DEFAULT_MIN_WIDTH_RATIO: f64 = 1e-3;

/// A graded, cell-centred partition of `[0, L]` with metric cell volumes.
///
/// Faces `s_{i-1/2}` run from the tip (`s = 0`) to `s = L`. The metric flux
/// vanishes on both end faces because the circumference does.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh {
    profile: SurfaceProfile,
    grading: f64,
    faces: Vec<f64>,
    nodes: Vec<f64>,
    volumes: Vec<f64>,
    node_radius: Vec<f64>,
    transmissibility: Vec<f64>,
}

/// Gauss–Legendre 3-point nodes/weights on [-1, 1].
const GL3_X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

fn graded_widths(cells: usize, q: f64, min_ratio: f64, symmetric: bool) -> Vec<f64> {
    if q >= 1.0 {
        return vec![1.0; cells];
    }
    let cap = if min_ratio > 0.0 && min_ratio < 1.0 {
        (min_ratio.ln() / q.ln()).floor() as usize
    } else {
        usize::MAX
    };
    if symmetric {
        let layer = ((cells - 1) / 2).min(cap);
        (0..cells)
            .map(|j| {
                let from_end = j.min(cells - 1 - j);
                q.powi(layer.saturating_sub(from_end) as i32)
            })
            .collect()
    } else {
        let layer = (cells - 1).min(cap);
        (0..cells)
            .map(|j| q.powi(layer.saturating_sub(j) as i32))
            .collect()
    }
}

impl RadialMesh {
    /// Mesh with `cells` cells whose widths shrink by `q` per cell toward the
    /// tip, with the default grading cap.
    pub fn build(profile: &SurfaceProfile, cells: usize, q: f64) -> Result<Self, GeometryError> {
        Self::build_with_cap(profile, cells, q, DEFAULT_MIN_WIDTH_RATIO)
    }

    /// Like [`RadialMesh::build`], but the graded layer stops once the width
    /// ratio would fall below `min_ratio`. `min_ratio = 0` grades every cell.
    pub fn build_with_cap(
        profile: &SurfaceProfile,
        cells: usize,
        q: f64,
        min_ratio: f64,
    ) -> Result<Self, GeometryError> {
        if cells < 4 {
            return Err(GeometryError::TooFewCells(cells));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(GeometryError::InvalidParameter {
                name: "q",
                value: q,
                reason: "grading ratio must lie in (0, 1]",
            });
        }
        let length = profile.length();
        let symmetric = matches!(profile.tip_end(), TipEnd::Conic(_));
        let raw = graded_widths(cells, q, min_ratio, symmetric);
        let total: f64 = raw.iter().sum();
        let widths: Vec<f64> = raw.iter().map(|w| w * length / total).collect();
        let smallest = widths.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(smallest >= 1e-14 * length) {
            return Err(GeometryError::CellUnderflow { width: smallest });
        }

        let mut faces = Vec::with_capacity(cells + 1);
        faces.push(0.0);
        let mut acc = 0.0;
        for w in &widths[..cells - 1] {
            acc += w;
            faces.push(acc);
        }
        faces.push(length);

        let nodes: Vec<f64> = faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let volumes: Vec<f64> = faces
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let half = 0.5 * (w[1] - w[0]);
                2.0 * PI
                    * half
                    * GL3_X
                        .iter()
                        .zip(GL3_W.iter())
                        .map(|(x, wt)| wt * profile.radius(mid + half * x))
                        .sum::<f64>()
            })
            .collect();
        let node_radius: Vec<f64> = nodes.iter().map(|&s| profile.radius(s)).collect();
        let transmissibility: Vec<f64> = (0..cells - 1)
            .map(|i| 2.0 * PI * profile.radius(faces[i + 1]) / (nodes[i + 1] - nodes[i]))
            .collect();

        if volumes.iter().any(|v| !(*v > 0.0)) || node_radius.iter().any(|f| !(*f > 0.0)) {
            return Err(GeometryError::CellUnderflow { width: smallest });
        }

        Ok(Self {
            profile: profile.clone(),
            grading: q,
            faces,
            nodes,
            volumes,
            node_radius,
            transmissibility,
        })
    }

    pub fn profile(&self) -> &SurfaceProfile {
        &self.profile
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn cells(&self) -> usize {
        self.nodes.len()
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// Cell-centre arclengths.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Metric cell volumes `2π ∫_cell f ds`.
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// `f(s_i)` at cell centres.
    pub fn node_radius(&self) -> &[f64] {
        &self.node_radius
    }

    /// `2π f(s_{i+1/2}) / (s_{i+1} - s_i)` for the `M - 1` interior faces.
    pub fn transmissibility(&self) -> &[f64] {
        &self.transmissibility
    }

    pub fn widths(&self) -> Vec<f64> {
        self.faces.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn min_width(&self) -> f64 {
        self.faces
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `Σ vol_i`.
    pub fn area(&self) -> f64 {
        self.volumes.iter().sum()
    }

    /// Smallest cell-centre arclength.
    pub fn s_min(&self) -> f64 {
        self.nodes[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ProfileKind;

    fn sphere() -> SurfaceProfile {
        SurfaceProfile::build(ProfileKind::Sphere, &[1.0]).unwrap()
    }

    #[test]
    fn uniform_partition() {
        let p = SurfaceProfile::build(ProfileKind::ConeCapped, &[1.0, 1.0]).unwrap();
        let m = RadialMesh::build(&p, 4, 1.0).unwrap();
        assert_eq!(m.faces(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(m.nodes(), &[0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn geometric_widths_halve_toward_tip() {
        let p = SurfaceProfile::build(ProfileKind::ConeCapped, &[0.5, 2.0]).unwrap();
        let m = RadialMesh::build(&p, 8, 0.5).unwrap();
        let w = m.widths();
        for pair in w.windows(2) {
            assert!((pair[0] / pair[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_area_at_64_cells() {
        let m = RadialMesh::build(&sphere(), 64, 1.0).unwrap();
        assert!((m.area() / (4.0 * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cap_limits_grading() {
        let p = SurfaceProfile::build(ProfileKind::ConeCapped, &[1.0, 2.0]).unwrap();
        let m = RadialMesh::build(&p, 512, 0.8).unwrap();
        let w = m.widths();
        let widest = w.iter().cloned().fold(0.0, f64::max);
        assert!(m.min_width() / widest >= DEFAULT_MIN_WIDTH_RATIO * 0.999);
        // without the cap the same mesh underflows
        assert!(matches!(
            RadialMesh::build_with_cap(&p, 512, 0.8, 0.0),
            Err(GeometryError::CellUnderflow { .. })
        ));
    }

    #[test]
    fn faces_strictly_increase_and_volumes_positive() {
        for (kind, params) in [
            (ProfileKind::Sphere, vec![1.3]),
            (ProfileKind::ConeCapped, vec![0.25, 3.0]),
            (ProfileKind::Spindle, vec![0.5, 0.3, 2.0]),
        ] {
            let p = SurfaceProfile::build(kind, &params).unwrap();
            for q in [1.0, 0.9, 0.7] {
                let m = RadialMesh::build(&p, 40, q).unwrap();
                assert_eq!(m.faces()[0], 0.0);
                assert_eq!(*m.faces().last().unwrap(), p.length());
                assert!(m.faces().windows(2).all(|w| w[1] > w[0]));
                assert!(m.volumes().iter().all(|&v| v > 0.0));
            }
        }
    }

    #[test]
    fn spindle_mesh_is_symmetric() {
        let p = SurfaceProfile::build(ProfileKind::Spindle, &[0.5, 0.5, 2.0]).unwrap();
        let m = RadialMesh::build(&p, 33, 0.8).unwrap();
        let w = m.widths();
        for j in 0..w.len() {
            assert!((w[j] - w[w.len() - 1 - j]).abs() < 1e-12);
        }
    }
}
