//! Generating curves of the invariant translator families.

pub mod grim;
pub mod helicoid;
pub mod mesh;
pub mod planar;
pub mod rotational;

use serde::Serialize;

use crate::ode::Trajectory;

pub use grim::{
    grim_reaper_closed_form, grim_reaper_rhs, slab, solve_grim_reaper, GrimReaperParams, SlabData,
};
pub use helicoid::{helicoid_curvature, helicoid_rhs, solve_helicoid, HelicoidDiagnostics, HelicoidParams};
pub use mesh::{sweep_surface, Group, Mesh};
pub use planar::planar_grim_reaper;
pub use rotational::{
    catenoid_apex, catenoid_rhs, rotational_rhs, solve_bowl, solve_catenoid, CatenoidOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    GrimReaper { lambda: f64, c: f64 },
    Bowl { lambda: f64 },
    Catenoid { lambda: f64, f0: f64, eps: f64 },
    Helicoid { lambda: f64, pitch: f64, r0: f64 },
    PlanarGrimReaper { a1: f64, a2: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::GrimReaper { .. } => "grim",
            Family::Bowl { .. } => "bowl",
            Family::Catenoid { .. } => "catenoid",
            Family::Helicoid { .. } => "helicoid",
            Family::PlanarGrimReaper { .. } => "planar-grim",
        }
    }
}

/// A sampled generating curve with per-sample derived scalars.
///
/// `rows` share the layout named by `columns`; `arms` keep the raw
/// trajectories for dense evaluation.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    pub family: Family,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub arms: Vec<Trajectory>,
}

impl ProfileCurve {
    pub fn new(family: Family, columns: &[&'static str]) -> Self {
        ProfileCurve { family, columns: columns.to_vec(), rows: Vec::new(), arms: Vec::new() }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Largest absolute value of a column, NaN-propagating.
    pub fn sup_abs(&self, name: &str) -> Option<f64> {
        let col = self.column(name)?;
        Some(col.iter().fold(0.0_f64, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) }))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
