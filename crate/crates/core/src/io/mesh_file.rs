//! Mesh codebook files (JSON).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::digitize::{Mesh, MeshKind};
use crate::error::{Error, Result};
use crate::group::Su2;

pub const MESH_FORMAT: &str = "su2-mesh";
pub const MESH_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub format: String,
    pub version: u32,
    #[serde(flatten)]
    pub kind: MeshKind,
    pub v: usize,
    pub digest: String,
    pub elements: Vec<[f64; 4]>,
}

impl MeshFile {
    pub fn from_mesh(mesh: &Mesh<f64>) -> Self {
        MeshFile {
            format: MESH_FORMAT.into(),
            version: MESH_FORMAT_VERSION,
            kind: mesh.kind(),
            v: mesh.len(),
            digest: mesh.digest_hex(),
            elements: mesh.elements().iter().map(|g| g.to_array()).collect(),
        }
    }

    /// Rebuild the mesh, checking size and digest.
    pub fn into_mesh(self) -> Result<Mesh<f64>> {
        if self.format != MESH_FORMAT {
            return Err(Error::Parse(format!("not a mesh file: format {:?}", self.format)));
        }
        if self.version != MESH_FORMAT_VERSION {
            return Err(Error::BadVersion {
                found: self.version as u16,
                expected: MESH_FORMAT_VERSION as u16,
            });
        }
        if self.elements.len() != self.v {
            return Err(Error::Parse(format!(
                "mesh file lists {} elements but v = {}",
                self.elements.len(),
                self.v
            )));
        }
        let mesh = Mesh::from_elements(self.kind, self.elements.into_iter().map(Su2::from_array).collect())?;
        if mesh.digest_hex() != self.digest {
            return Err(Error::MeshDigestMismatch {
                expected: self.digest,
                found: mesh.digest_hex(),
            });
        }
        Ok(mesh)
    }
}

pub fn mesh_to_json(mesh: &Mesh<f64>) -> String {
    // f64 values print in shortest round-trip form, so the text is stable
    serde_json::to_string_pretty(&MeshFile::from_mesh(mesh)).expect("mesh serializes") + "\n"
}

pub fn write_mesh(path: &Path, mesh: &Mesh<f64>) -> Result<()> {
    fs::write(path, mesh_to_json(mesh)).map_err(|e| Error::io(path, e))
}

pub fn read_mesh(path: &Path) -> Result<Mesh<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: MeshFile = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    file.into_mesh()
}
