//! Quad meshes obtained by sweeping a profile with its one-parameter group.

use serde::Serialize;

use super::{Family, ProfileCurve};
use crate::error::{Error, Result};
use crate::geometry::{Isometry, Point};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Group {
    /// `L_(u, 0, cu)`
    Translation { c: f64 },
    /// `ρ_u`
    Rotation,
    /// `L_(0, 0, pitch·u) ∘ ρ_u`
    Helicoidal { pitch: f64 },
}

impl Group {
    pub fn name(&self) -> &'static str {
        match self {
            Group::Translation { .. } => "translation",
            Group::Rotation => "rotation",
            Group::Helicoidal { .. } => "helicoidal",
        }
    }

    /// The group leaving a family invariant, if it has one.
    pub fn for_family(family: &Family) -> Option<Group> {
        match *family {
            Family::GrimReaper { c, .. } => Some(Group::Translation { c }),
            Family::Bowl { .. } | Family::Catenoid { .. } => Some(Group::Rotation),
            Family::Helicoid { pitch, .. } => Some(Group::Helicoidal { pitch }),
            Family::PlanarGrimReaper { .. } => None,
        }
    }

    pub fn element(&self, u: f64) -> Isometry {
        match *self {
            Group::Translation { c } => Isometry::LeftTranslation(Point::new(u, 0.0, c * u)),
            Group::Rotation => Isometry::HorizontalRotation(u),
            Group::Helicoidal { pitch } => Isometry::Composite(vec![
                Isometry::HorizontalRotation(u),
                Isometry::LeftTranslation(Point::new(0.0, 0.0, pitch * u)),
            ]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    /// Number of group parameter samples.
    pub group_samples: usize,
    /// Group parameter range; ignored for a closed rotation sweep.
    pub range: (f64, f64),
    /// Close the sweep over a full turn (rotation only).
    pub full_turn: bool,
    /// Upper bound on the number of vertices.
    pub vertex_budget: usize,
}

impl SweepSpec {
    pub fn default_for(group: &Group) -> Self {
        match group {
            Group::Rotation => SweepSpec { group_samples: 64, range: (0.0, std::f64::consts::TAU), full_turn: true, vertex_budget: 40_000 },
            Group::Translation { .. } => SweepSpec { group_samples: 41, range: (-2.0, 2.0), full_turn: false, vertex_budget: 40_000 },
            Group::Helicoidal { .. } => SweepSpec { group_samples: 65, range: (-std::f64::consts::PI, std::f64::consts::PI), full_turn: false, vertex_budget: 40_000 },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub h: Vec<f64>,
    pub residual: Vec<f64>,
    pub k: Vec<f64>,
    /// Quads as 0-based vertex indices.
    pub faces: Vec<[usize; 4]>,
    pub profile_count: usize,
    pub sweep_count: usize,
    pub closed: bool,
}

/// The profile as points of the slice swept by the group, with `(H, residual, K)`.
fn profile_points(profile: &ProfileCurve) -> Result<Vec<(Point, [f64; 3])>> {
    let col = |name: &str| profile.column(name);
    let nan = vec![f64::NAN; profile.len()];
    let h = col("H").unwrap_or_else(|| nan.clone());
    let res = col("residual").unwrap_or_else(|| nan.clone());
    let k = col("K_gauss").unwrap_or_else(|| nan.clone());
    let pts: Vec<Point> = match profile.family {
        Family::GrimReaper { .. } => {
            let (y, g) = (col("y").unwrap(), col("gamma").unwrap());
            y.iter().zip(&g).map(|(y, g)| Point::new(0.0, *y, *g)).collect()
        }
        Family::Bowl { .. } => {
            let (r, p) = (col("r").unwrap(), col("phi").unwrap());
            r.iter().zip(&p).map(|(r, p)| Point::new(*r, 0.0, *p)).collect()
        }
        Family::Catenoid { .. } => {
            let (r, z) = (col("r").unwrap(), col("z").unwrap());
            r.iter().zip(&z).map(|(r, z)| Point::new(*r, 0.0, *z)).collect()
        }
        Family::Helicoid { .. } => {
            let (a, b) = (col("gamma1").unwrap(), col("gamma2").unwrap());
            a.iter().zip(&b).map(|(a, b)| Point::new(*a, *b, 0.0)).collect()
        }
        Family::PlanarGrimReaper { .. } => {
            return Err(Error::FamilyMismatch { found: profile.family.name().into(), group: "any Nil3".into() })
        }
    };
    Ok(pts.into_iter().enumerate().map(|(i, p)| (p, [h[i], res[i], k[i]])).collect())
}

/// Keeps at most `n` points, evenly spaced in arc length, always including both ends.
fn arc_length_subsample(pts: &[(Point, [f64; 3])], n: usize) -> Vec<usize> {
    if pts.len() <= n || n < 2 {
        return (0..pts.len()).collect();
    }
    let mut acc = vec![0.0];
    for w in pts.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt();
        acc.push(acc[acc.len() - 1] + d);
    }
    let total = acc[acc.len() - 1];
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        let target = total * i as f64 / (n - 1) as f64;
        while j + 1 < acc.len() && acc[j + 1] <= target {
            j += 1;
        }
        if out.last() != Some(&j) {
            out.push(j);
        }
    }
    if out.last() != Some(&(pts.len() - 1)) {
        out.push(pts.len() - 1);
    }
    out
}

pub fn sweep_surface(profile: &ProfileCurve, group: Group, spec: &SweepSpec) -> Result<Mesh> {
    let expected = Group::for_family(&profile.family);
    let matches = matches!(
        (expected, group),
        (Some(Group::Translation { .. }), Group::Translation { .. })
            | (Some(Group::Rotation), Group::Rotation)
            | (Some(Group::Helicoidal { .. }), Group::Helicoidal { .. })
    );
    if !matches {
        return Err(Error::FamilyMismatch { found: profile.family.name().into(), group: group.name().into() });
    }
    let closed = spec.full_turn && group == Group::Rotation;
    let m = spec.group_samples.max(2);
    let pts = profile_points(profile)?;
    let keep = arc_length_subsample(&pts, (spec.vertex_budget / m).max(2));
    let n = keep.len();

    let params: Vec<f64> = (0..m)
        .map(|j| {
            if closed {
                std::f64::consts::TAU * j as f64 / m as f64
            } else {
                spec.range.0 + (spec.range.1 - spec.range.0) * j as f64 / (m - 1) as f64
            }
        })
        .collect();

    let mut mesh = Mesh {
        vertices: Vec::with_capacity(n * m),
        h: Vec::with_capacity(n * m),
        residual: Vec::with_capacity(n * m),
        k: Vec::with_capacity(n * m),
        faces: Vec::new(),
        profile_count: n,
        sweep_count: m,
        closed,
    };
    for &i in &keep {
        let (p, d) = pts[i];
        for &u in &params {
            mesh.vertices.push(group.element(u).apply(p));
            mesh.h.push(d[0]);
            mesh.residual.push(d[1]);
            mesh.k.push(d[2]);
        }
    }
    let cols = if closed { m } else { m - 1 };
    for i in 0..n - 1 {
        for j in 0..cols {
            let jn = (j + 1) % m;
            mesh.faces.push([i * m + j, (i + 1) * m + j, (i + 1) * m + jn, i * m + jn]);
        }
    }
    Ok(mesh)
}
