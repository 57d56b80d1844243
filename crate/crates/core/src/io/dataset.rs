//! Layout of ensemble directories.
//!
//! An ensemble directory holds `cfg_<trajectory>.su2` files and
//! `ensemble.json`. A projected directory additionally holds `scheme.json`
//! and, for mesh schemes, the codebook as `mesh.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::digitize::{Mesh, Scheme, ULTRAFINE_BITS_PER_LINK};
use crate::error::{Error, Result};
use crate::monte_carlo::RunParams;

pub const SCHEME_FILE: &str = "scheme.json";
pub const MESH_FILE: &str = "mesh.json";

/// Stable identifier of the Markov chain an ensemble came from; shared by
/// all projections of it.
pub fn ensemble_id(params: &RunParams) -> String {
    let d = params.dims;
    format!("b{}-{}x{}x{}x{}-s{}", params.beta, d[0], d[1], d[2], d[3], params.seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeInfo {
    pub name: String,
    pub bits_per_link: f64,
    pub scheme: Scheme,
    /// Payload kind of the stored configurations.
    pub emit: String,
    pub mesh_digest: Option<String>,
}

impl SchemeInfo {
    pub fn ultrafine() -> Self {
        SchemeInfo {
            name: Scheme::Ultrafine.to_string(),
            bits_per_link: ULTRAFINE_BITS_PER_LINK,
            scheme: Scheme::Ultrafine,
            emit: "quaternion".into(),
            mesh_digest: None,
        }
    }
}

pub fn write_scheme(dir: &Path, info: &SchemeInfo) -> Result<()> {
    let path = dir.join(SCHEME_FILE);
    let text = serde_json::to_string_pretty(info).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// The directory's scheme; directories without `scheme.json` are undigitized.
pub fn read_scheme(dir: &Path) -> Result<SchemeInfo> {
    let path = dir.join(SCHEME_FILE);
    if !path.exists() {
        return Ok(SchemeInfo::ultrafine());
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// The directory's codebook, if it has one.
pub fn read_dir_mesh(dir: &Path) -> Result<Option<Mesh<f64>>> {
    let path = dir.join(MESH_FILE);
    if path.exists() {
        super::mesh_file::read_mesh(&path).map(Some)
    } else {
        Ok(None)
    }
}
