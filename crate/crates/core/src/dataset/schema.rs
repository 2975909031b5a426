use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default speed of sound used for the Mach-number feature, m/s.
pub const DEFAULT_SPEED_OF_SOUND: f64 = 340.0;

/// Column roles understood by the loaders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    X,
    Y,
    U,
    V,
    W,
    P,
    K,
    Epsilon,
    NuT,
    WallDistance,
    DuDx,
    DuDy,
    DvDx,
    DvDy,
    DwDx,
    DwDy,
    DpDx,
    DpDy,
    DkDx,
    DkDy,
    Uu,
    Vv,
    Ww,
    Uv,
    Uw,
    Vw,
}

impl Role {
    pub const ALL: [Role; 26] = [
        Role::X,
        Role::Y,
        Role::U,
        Role::V,
        Role::W,
        Role::P,
        Role::K,
        Role::Epsilon,
        Role::NuT,
        Role::WallDistance,
        Role::DuDx,
        Role::DuDy,
        Role::DvDx,
        Role::DvDy,
        Role::DwDx,
        Role::DwDy,
        Role::DpDx,
        Role::DpDy,
        Role::DkDx,
        Role::DkDy,
        Role::Uu,
        Role::Vv,
        Role::Ww,
        Role::Uv,
        Role::Uw,
        Role::Vw,
    ];

    pub const MEAN_FLOW: [Role; 10] = [
        Role::X,
        Role::Y,
        Role::U,
        Role::V,
        Role::P,
        Role::K,
        Role::Epsilon,
        Role::NuT,
        Role::WallDistance,
        Role::W,
    ];

    /// Gradient columns that must all be present for file gradients to be used.
    pub const MEAN_GRADIENTS: [Role; 6] = [
        Role::DuDx,
        Role::DuDy,
        Role::DvDx,
        Role::DvDy,
        Role::DpDx,
        Role::DpDy,
    ];

    /// In `(uu, vv, ww, uv, uw, vw)` order.
    pub const STRESSES: [Role; 6] = [Role::Uu, Role::Vv, Role::Ww, Role::Uv, Role::Uw, Role::Vw];

    /// Canonical key, also the default column header.
    pub fn key(self) -> &'static str {
        match self {
            Role::X => "x",
            Role::Y => "y",
            Role::U => "U",
            Role::V => "V",
            Role::W => "W",
            Role::P => "P",
            Role::K => "k",
            Role::Epsilon => "epsilon",
            Role::NuT => "nu_t",
            Role::WallDistance => "d",
            Role::DuDx => "dU_dx",
            Role::DuDy => "dU_dy",
            Role::DvDx => "dV_dx",
            Role::DvDy => "dV_dy",
            Role::DwDx => "dW_dx",
            Role::DwDy => "dW_dy",
            Role::DpDx => "dP_dx",
            Role::DpDy => "dP_dy",
            Role::DkDx => "dk_dx",
            Role::DkDy => "dk_dy",
            Role::Uu => "uu",
            Role::Vv => "vv",
            Role::Ww => "ww",
            Role::Uv => "uv",
            Role::Uw => "uw",
            Role::Vw => "vw",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Role::X => "x coordinate",
            Role::Y => "y coordinate",
            Role::U => "streamwise velocity",
            Role::V => "wall-normal velocity",
            Role::W => "spanwise velocity",
            Role::P => "pressure",
            Role::K => "turbulent kinetic energy",
            Role::Epsilon => "dissipation rate",
            Role::NuT => "eddy viscosity",
            Role::WallDistance => "wall distance",
            Role::DuDx | Role::DuDy | Role::DvDx | Role::DvDy | Role::DwDx | Role::DwDy => {
                "velocity gradient"
            }
            Role::DpDx | Role::DpDy => "pressure gradient",
            Role::DkDx | Role::DkDy => "turbulent kinetic energy gradient",
            Role::Uu | Role::Vv | Role::Ww | Role::Uv | Role::Uw | Role::Vw => "Reynolds stress",
        }
    }

    pub fn from_key(key: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.key() == key)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Structured grid dimensions; points are ordered with `i` (along `nx`) fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    pub nx: usize,
    pub ny: usize,
}

impl GridDims {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
}

/// Per-dataset physical constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Density, kg/m³.
    pub rho: f64,
    /// Molecular kinematic viscosity, m²/s.
    pub nu: f64,
    /// Speed of sound, m/s.
    pub c0: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    tag: Option<String>,
    #[serde(default)]
    columns: BTreeMap<String, String>,
    #[serde(default)]
    constants: ConstantsFile,
    grid: Option<GridDims>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsFile {
    rho: Option<f64>,
    nu: Option<f64>,
    c0: Option<f64>,
}

/// Maps column roles to header names and carries dataset constants.
///
/// Schema files are TOML:
///
/// ```toml
/// tag = "wavy-wall-rans"
///
/// [grid]
/// nx = 128
/// ny = 128
///
/// [constants]
/// rho = 1.0
/// nu = 1.0e-5
/// c0 = 340.0
///
/// [columns]
/// k = "tke"
/// nu_t = "turb_visc"
/// ```
///
/// Roles not listed under `[columns]` use their canonical key as header.
#[derive(Clone, Debug, PartialEq)]
pub struct Schema {
    pub tag: String,
    columns: BTreeMap<Role, String>,
    pub rho: Option<f64>,
    pub nu: Option<f64>,
    pub c0: f64,
    pub grid: Option<GridDims>,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            tag: "unnamed".to_string(),
            columns: BTreeMap::new(),
            rho: None,
            nu: None,
            c0: DEFAULT_SPEED_OF_SOUND,
            grid: None,
        }
    }
}

impl Schema {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: SchemaFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("schema: {e}")))?;
        let mut columns = BTreeMap::new();
        for (key, header) in raw.columns {
            let role = Role::from_key(&key)
                .ok_or_else(|| Error::Config(format!("schema: unknown column role '{key}'")))?;
            columns.insert(role, header);
        }
        Ok(Schema {
            tag: raw.tag.unwrap_or_else(|| "unnamed".to_string()),
            columns,
            rho: raw.constants.rho,
            nu: raw.constants.nu,
            c0: raw.constants.c0.unwrap_or(DEFAULT_SPEED_OF_SOUND),
            grid: raw.grid,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn with_column(mut self, role: Role, header: impl Into<String>) -> Self {
        self.columns.insert(role, header.into());
        self
    }

    pub fn with_constants(mut self, rho: f64, nu: f64, c0: f64) -> Self {
        self.rho = Some(rho);
        self.nu = Some(nu);
        self.c0 = c0;
        self
    }

    pub fn with_grid(mut self, nx: usize, ny: usize) -> Self {
        self.grid = Some(GridDims { nx, ny });
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    /// Header expected for `role`.
    pub fn header(&self, role: Role) -> &str {
        self.columns
            .get(&role)
            .map(String::as_str)
            .unwrap_or(role.key())
    }

    /// Constants, failing if density or viscosity were never supplied.
    pub fn constants(&self) -> Result<Constants> {
        let rho = self
            .rho
            .ok_or_else(|| Error::Config("density constant 'rho' not supplied".into()))?;
        let nu = self
            .nu
            .ok_or_else(|| Error::Config("viscosity constant 'nu' not supplied".into()))?;
        Ok(Constants {
            rho,
            nu,
            c0: self.c0,
        })
    }
}
