//! File formats: configurations, mesh codebooks, measurement tables and run
//! manifests.

pub mod bitpack;
pub mod config;
pub mod dataset;
pub mod manifest;
pub mod mesh_file;
pub mod records;

pub use config::{
    decode_indexed, encode_indexed, read_config, read_header, write_config, ConfigHeader, IndexedPayload, PayloadKind,
    HEADER_LEN,
};
pub use dataset::{ensemble_id, read_dir_mesh, read_scheme, write_scheme, SchemeInfo, MESH_FILE, SCHEME_FILE};
pub use manifest::{sha256_file, Manifest, MANIFEST_FILE};
pub use mesh_file::{read_mesh, write_mesh, MeshFile};
pub use records::{read_csv, read_records, write_csv, write_records};
