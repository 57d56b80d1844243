//! Binary gauge configuration files.
//!
//! Layout, all little-endian:
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0  | 6  | magic `SU2LAT` |
//! | 6  | 2  | format version (u16) |
//! | 8  | 16 | dims, 4 × u32, X Y Z T |
//! | 24 | 8  | β (f64) |
//! | 32 | 8  | trajectory index (u64) |
//! | 40 | 8  | seed (u64) |
//! | 48 | 1  | start flag (0 cold, 1 hot) |
//! | 49 | 1  | payload kind (0 quaternion-f64, 1 indexed-mesh, 2 fixed-point) |
//! | 50 | 32 | mesh digest (zero unless indexed) |
//! | 82 | 4  | payload parameter: mesh size `v`, or `p` (u32) |
//! | 86 | …  | payload |
//!
//! Payloads store links in lattice storage order:
//!
//! * quaternion-f64: `a b c d` as four f64 per link, 32 bytes;
//! * indexed-mesh: mesh indices packed at `ceil(log₂ v)` bits;
//! * fixed-point: `a b c` as `p`-bit sign-magnitude codes plus a 2-bit code
//!   for `d` (0 → +0, 1 → +|d|, 2 → −|d|, 3 → −0), `|d|` being rebuilt from
//!   the unit-norm condition. `3p + 2` bits per link, bit packed.

use std::fs;
use std::path::Path;

use super::bitpack::{pack, packed_len, unpack};
use crate::digitize::mesh::index_bits;
use crate::digitize::{fixed_point_truncate, FixedPointSpec, Mesh};
use crate::error::{Error, Result};
use crate::group::Su2;
use crate::lattice::{GaugeField, LatticeGeometry};
use crate::monte_carlo::Start;

pub const MAGIC: &[u8; 6] = b"SU2LAT";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 86;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PayloadKind {
    QuaternionF64,
    Indexed,
    FixedPoint,
}

impl PayloadKind {
    pub fn code(self) -> u8 {
        match self {
            PayloadKind::QuaternionF64 => 0,
            PayloadKind::Indexed => 1,
            PayloadKind::FixedPoint => 2,
        }
    }

    pub fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(PayloadKind::QuaternionF64),
            1 => Ok(PayloadKind::Indexed),
            2 => Ok(PayloadKind::FixedPoint),
            other => Err(Error::Parse(format!("unknown payload kind {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigHeader {
    pub dims: [u32; 4],
    pub beta: f64,
    pub trajectory: u64,
    pub seed: u64,
    pub start: Start,
    pub payload: PayloadKind,
    pub mesh_digest: [u8; 32],
    /// Mesh size for indexed payloads, `p` for fixed point, 0 otherwise.
    pub param: u32,
}

impl ConfigHeader {
    pub fn quaternion(dims: [usize; 4], beta: f64, trajectory: u64, seed: u64, start: Start) -> Self {
        ConfigHeader {
            dims: dims.map(|d| d as u32),
            beta,
            trajectory,
            seed,
            start,
            payload: PayloadKind::QuaternionF64,
            mesh_digest: [0; 32],
            param: 0,
        }
    }

    /// Same provenance, indexed payload on `mesh`.
    pub fn indexed(&self, mesh: &Mesh<f64>) -> Self {
        ConfigHeader {
            payload: PayloadKind::Indexed,
            mesh_digest: mesh.digest(),
            param: mesh.len() as u32,
            ..self.clone()
        }
    }

    /// Same provenance, fixed-point payload at precision `spec`.
    pub fn fixed_point(&self, spec: FixedPointSpec) -> Self {
        ConfigHeader {
            payload: PayloadKind::FixedPoint,
            mesh_digest: [0; 32],
            param: spec.bits(),
            ..self.clone()
        }
    }

    /// Same provenance, full-precision payload.
    pub fn as_quaternion(&self) -> Self {
        ConfigHeader {
            payload: PayloadKind::QuaternionF64,
            mesh_digest: [0; 32],
            param: 0,
            ..self.clone()
        }
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims.map(|d| d as usize)
    }

    pub fn n_links(&self) -> usize {
        4 * self.dims.iter().map(|&d| d as usize).product::<usize>()
    }

    /// Exact payload byte count implied by the header.
    pub fn payload_len(&self) -> Result<usize> {
        let n = self.n_links();
        Ok(match self.payload {
            PayloadKind::QuaternionF64 => 32 * n,
            PayloadKind::Indexed => {
                if self.param == 0 {
                    return Err(Error::Parse("indexed payload with mesh size 0".into()));
                }
                packed_len(n, index_bits(self.param as usize))
            }
            PayloadKind::FixedPoint => {
                let spec = FixedPointSpec::new(self.param)?;
                packed_len(n, fixed_point_link_bits(spec))
            }
        })
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..6].copy_from_slice(MAGIC);
        b[6..8].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        for (i, d) in self.dims.iter().enumerate() {
            b[8 + 4 * i..12 + 4 * i].copy_from_slice(&d.to_le_bytes());
        }
        b[24..32].copy_from_slice(&self.beta.to_le_bytes());
        b[32..40].copy_from_slice(&self.trajectory.to_le_bytes());
        b[40..48].copy_from_slice(&self.seed.to_le_bytes());
        b[48] = self.start.flag();
        b[49] = self.payload.code();
        b[50..82].copy_from_slice(&self.mesh_digest);
        b[82..86].copy_from_slice(&self.param.to_le_bytes());
        b
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        if b.len() < MAGIC.len() || &b[..6] != MAGIC {
            return Err(Error::BadMagic);
        }
        if b.len() < HEADER_LEN {
            return Err(Error::Truncated {
                expected: HEADER_LEN,
                found: b.len(),
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(b[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(b[o..o + 8].try_into().unwrap());
        let version = u16::from_le_bytes([b[6], b[7]]);
        if version != FORMAT_VERSION {
            return Err(Error::BadVersion {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        Ok(ConfigHeader {
            dims: [u32_at(8), u32_at(12), u32_at(16), u32_at(20)],
            beta: f64::from_bits(u64_at(24)),
            trajectory: u64_at(32),
            seed: u64_at(40),
            start: Start::from_flag(b[48])?,
            payload: PayloadKind::from_code(b[49])?,
            mesh_digest: b[50..82].try_into().unwrap(),
            param: u32_at(82),
        })
    }
}

/// Bits stored per link by the fixed-point payload.
pub fn fixed_point_link_bits(spec: FixedPointSpec) -> u32 {
    3 * spec.bits() + 2
}

/// Indices of a projected field on its mesh.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedPayload {
    pub mesh_digest: [u8; 32],
    pub mesh_size: u32,
    pub bytes: Vec<u8>,
}

/// Pack every link's mesh index. Every link must already be a mesh element;
/// there is no nearest-element fallback.
pub fn encode_indexed(field: &GaugeField<f64>, mesh: &Mesh<f64>) -> Result<IndexedPayload> {
    let mut idx = Vec::with_capacity(field.links().len());
    for (i, u) in field.links().iter().enumerate() {
        idx.push(mesh.index_of(*u).ok_or(Error::NotOnMesh { link: i })? as u64);
    }
    Ok(IndexedPayload {
        mesh_digest: mesh.digest(),
        mesh_size: mesh.len() as u32,
        bytes: pack(&idx, mesh.index_bits()),
    })
}

/// Rebuild the field from packed indices. The mesh must match the payload's
/// digest.
pub fn decode_indexed(
    payload: &IndexedPayload,
    mesh: &Mesh<f64>,
    geometry: LatticeGeometry,
) -> Result<GaugeField<f64>> {
    let found = mesh.digest();
    if found != payload.mesh_digest {
        return Err(Error::MeshDigestMismatch {
            expected: hex::encode(payload.mesh_digest),
            found: hex::encode(found),
        });
    }
    if payload.mesh_size as usize != mesh.len() {
        return Err(Error::Parse(format!(
            "payload mesh size {} differs from mesh size {}",
            payload.mesh_size,
            mesh.len()
        )));
    }
    let idx = unpack(&payload.bytes, mesh.index_bits(), geometry.n_links())?;
    let mut links = Vec::with_capacity(idx.len());
    for i in idx {
        links.push(mesh.get(i as usize).ok_or(Error::IndexOutOfRange {
            index: i,
            size: mesh.len(),
        })?);
    }
    GaugeField::from_links(geometry, links)
}

fn d_code(d: f64) -> u64 {
    match (d == 0.0, d.is_sign_negative()) {
        (true, false) => 0,
        (false, false) => 1,
        (false, true) => 2,
        (true, true) => 3,
    }
}

fn encode_fixed_point(field: &GaugeField<f64>, spec: FixedPointSpec) -> Result<Vec<u8>> {
    let p = spec.bits();
    let width = fixed_point_link_bits(spec);
    let mut codes = Vec::with_capacity(field.links().len() * 4);
    for (i, u) in field.links().iter().enumerate() {
        if fixed_point_truncate(*u, spec).to_array().map(f64::to_bits) != u.to_array().map(f64::to_bits) {
            return Err(Error::InvalidParameter(format!(
                "link {i} is not on the {p}-bit fixed-point grid"
            )));
        }
        let mut word = 0u64;
        for (k, x) in [u.a, u.b, u.c].into_iter().enumerate() {
            let (neg, m) = spec.encode(x);
            word |= (m | (neg as u64) << (p - 1)) << (k as u32 * p);
        }
        codes.push((word, d_code(u.d)));
    }
    // a link can exceed 64 bits, so the a/b/c word and the d code are packed
    // as separate fields of one stream
    let mut out = vec![0u8; packed_len(codes.len(), width)];
    let mut bit = 0usize;
    for (word, d) in codes {
        put_bits(&mut out, bit, word, 3 * p);
        put_bits(&mut out, bit + 3 * p as usize, d, 2);
        bit += width as usize;
    }
    Ok(out)
}

fn put_bits(out: &mut [u8], at: usize, v: u64, n: u32) {
    for k in 0..n as usize {
        if (v >> k) & 1 == 1 {
            out[(at + k) / 8] |= 1 << ((at + k) % 8);
        }
    }
}

fn get_bits(b: &[u8], at: usize, n: u32) -> u64 {
    let mut v = 0u64;
    for k in 0..n as usize {
        if (b[(at + k) / 8] >> ((at + k) % 8)) & 1 == 1 {
            v |= 1 << k;
        }
    }
    v
}

fn decode_fixed_point(bytes: &[u8], spec: FixedPointSpec, geometry: LatticeGeometry) -> Result<GaugeField<f64>> {
    let p = spec.bits();
    let width = fixed_point_link_bits(spec) as usize;
    let mask = (1u64 << (p - 1)) - 1;
    let links = (0..geometry.n_links())
        .map(|i| {
            let at = i * width;
            let mut abc = [0.0; 3];
            for (k, x) in abc.iter_mut().enumerate() {
                let code = get_bits(bytes, at + k * p as usize, p);
                *x = spec.decode((code >> (p - 1)) & 1 == 1, code & mask);
            }
            let m = spec.implied_d_magnitude(abc[0], abc[1], abc[2]);
            let d = match get_bits(bytes, at + 3 * p as usize, 2) {
                0 => 0.0,
                1 => m,
                2 => -m,
                _ => -0.0,
            };
            Su2::new(abc[0], abc[1], abc[2], d)
        })
        .collect();
    let mut f = GaugeField::from_links(geometry, links)?;
    f.mark_off_manifold(true);
    Ok(f)
}

/// Serialize header and payload. Indexed payloads need the mesh named by the
/// header's digest.
pub fn config_bytes(header: &ConfigHeader, field: &GaugeField<f64>, mesh: Option<&Mesh<f64>>) -> Result<Vec<u8>> {
    if header.dims() != field.geometry().dims() {
        return Err(Error::GeometryMismatch(format!(
            "header dims {:?} vs field dims {:?}",
            header.dims(),
            field.geometry().dims()
        )));
    }
    let payload = match header.payload {
        PayloadKind::QuaternionF64 => {
            let mut v = Vec::with_capacity(32 * field.links().len());
            for u in field.links() {
                for x in u.to_array() {
                    v.extend_from_slice(&x.to_le_bytes());
                }
            }
            v
        }
        PayloadKind::Indexed => {
            let mesh = mesh.ok_or_else(|| Error::InvalidParameter("indexed payload needs its mesh".into()))?;
            if mesh.digest() != header.mesh_digest || mesh.len() as u32 != header.param {
                return Err(Error::MeshDigestMismatch {
                    expected: hex::encode(header.mesh_digest),
                    found: mesh.digest_hex(),
                });
            }
            encode_indexed(field, mesh)?.bytes
        }
        PayloadKind::FixedPoint => encode_fixed_point(field, FixedPointSpec::new(header.param)?)?,
    };
    debug_assert_eq!(payload.len(), header.payload_len()?);
    let mut out = header.to_bytes().to_vec();
    out.extend_from_slice(&payload);
    Ok(out)
}

/// Parse a configuration file image.
pub fn parse_config(bytes: &[u8], mesh: Option<&Mesh<f64>>) -> Result<(ConfigHeader, GaugeField<f64>)> {
    let header = ConfigHeader::from_bytes(bytes)?;
    let geometry = LatticeGeometry::new(header.dims())?;
    let body = &bytes[HEADER_LEN..];
    let expected = header.payload_len()?;
    if body.len() != expected {
        return Err(Error::Truncated {
            expected,
            found: body.len(),
        });
    }
    let field = match header.payload {
        PayloadKind::QuaternionF64 => {
            let links = body
                .chunks_exact(32)
                .map(|c| {
                    let f = |k: usize| f64::from_le_bytes(c[8 * k..8 * k + 8].try_into().unwrap());
                    Su2::new(f(0), f(1), f(2), f(3))
                })
                .collect();
            GaugeField::from_links(geometry, links)?
        }
        PayloadKind::Indexed => {
            let mesh = mesh.ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "indexed configuration needs the mesh with digest {}",
                    hex::encode(header.mesh_digest)
                ))
            })?;
            let payload = IndexedPayload {
                mesh_digest: header.mesh_digest,
                mesh_size: header.param,
                bytes: body.to_vec(),
            };
            decode_indexed(&payload, mesh, geometry)?
        }
        PayloadKind::FixedPoint => decode_fixed_point(body, FixedPointSpec::new(header.param)?, geometry)?,
    };
    Ok((header, field))
}

pub fn write_config(
    path: &Path,
    header: &ConfigHeader,
    field: &GaugeField<f64>,
    mesh: Option<&Mesh<f64>>,
) -> Result<()> {
    let bytes = config_bytes(header, field, mesh)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_config(path: &Path, mesh: Option<&Mesh<f64>>) -> Result<(ConfigHeader, GaugeField<f64>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_config(&bytes, mesh)
}

/// Header only, without decoding the payload.
pub fn read_header(path: &Path) -> Result<ConfigHeader> {
    use std::io::Read;
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut b = Vec::with_capacity(HEADER_LEN);
    f.by_ref()
        .take(HEADER_LEN as u64)
        .read_to_end(&mut b)
        .map_err(|e| Error::io(path, e))?;
    ConfigHeader::from_bytes(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitize::{gen_edgewise_mesh, gen_subgroup, project_fixed_point, project_l2, Subgroup};
    use crate::rng::seeded;

    fn hot(dims: [usize; 4], seed: u64) -> GaugeField<f64> {
        GaugeField::hot(LatticeGeometry::new(dims).unwrap(), &mut seeded(seed))
    }

    fn header(dims: [usize; 4]) -> ConfigHeader {
        ConfigHeader::quaternion(dims, 2.0, 7, 42, Start::Hot)
    }

    #[test]
    fn header_round_trip_and_size() {
        let h = header([2, 3, 4, 5]).indexed(&gen_subgroup(Subgroup::Icosahedral));
        let b = h.to_bytes();
        assert_eq!(b.len(), HEADER_LEN);
        assert_eq!(&b[..6], b"SU2LAT");
        assert_eq!(ConfigHeader::from_bytes(&b).unwrap(), h);
    }

    #[test]
    fn cold_round_trip_is_byte_identical() {
        let f = GaugeField::<f64>::cold(LatticeGeometry::hypercube(2).unwrap());
        let h = ConfigHeader::quaternion([2; 4], 2.0, 0, 1, Start::Cold);
        let bytes = config_bytes(&h, &f, None).unwrap();
        let (h2, f2) = parse_config(&bytes, None).unwrap();
        assert_eq!((h2.clone(), f2.clone()), (h, f));
        assert_eq!(config_bytes(&h2, &f2, None).unwrap(), bytes);
    }

    #[test]
    fn quaternion_payload_size() {
        let h = header([8; 4]);
        assert_eq!(h.payload_len().unwrap(), 524_288);
        let f = hot([4, 4, 4, 2], 1);
        let h = header([4, 4, 4, 2]);
        let bytes = config_bytes(&h, &f, None).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 32 * 4 * 128);
        let (_, g) = parse_config(&bytes, None).unwrap();
        for (u, v) in f.links().iter().zip(g.links()) {
            assert_eq!(u.to_array().map(f64::to_bits), v.to_array().map(f64::to_bits));
        }
    }

    #[test]
    fn indexed_payload_size_and_round_trip() {
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        assert_eq!(header([8; 4]).indexed(&mesh).payload_len().unwrap(), 14_336);
        let f = project_l2(&hot([4, 4, 2, 2], 2), &mesh).unwrap();
        let h = header([4, 4, 2, 2]).indexed(&mesh);
        let bytes = config_bytes(&h, &f, Some(&mesh)).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + (4 * 64 * 7usize).div_ceil(8));
        let (_, g) = parse_config(&bytes, Some(&mesh)).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn indexed_v8_three_bits() {
        let mesh: Mesh<f64> = gen_edgewise_mesh(1).unwrap();
        let f = project_l2(&hot([2; 4], 3), &mesh).unwrap();
        let p = encode_indexed(&f, &mesh).unwrap();
        assert_eq!(p.bytes.len(), 64 * 3 / 8);
        assert_eq!(decode_indexed(&p, &mesh, f.geometry().clone()).unwrap(), f);
    }

    #[test]
    fn unprojected_field_refused() {
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Tetrahedral);
        let f = hot([2; 4], 4);
        assert!(matches!(encode_indexed(&f, &mesh), Err(Error::NotOnMesh { link: 0 })));
    }

    #[test]
    fn wrong_mesh_refused() {
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Tetrahedral);
        let other: Mesh<f64> = gen_subgroup(Subgroup::Octahedral);
        let f = project_l2(&hot([2; 4], 5), &mesh).unwrap();
        let p = encode_indexed(&f, &mesh).unwrap();
        assert!(matches!(
            decode_indexed(&p, &other, f.geometry().clone()),
            Err(Error::MeshDigestMismatch { .. })
        ));
        let h = header([2; 4]).indexed(&mesh);
        let bytes = config_bytes(&h, &f, Some(&mesh)).unwrap();
        assert!(matches!(
            parse_config(&bytes, Some(&other)),
            Err(Error::MeshDigestMismatch { .. })
        ));
        assert!(parse_config(&bytes, None).is_err());
    }

    #[test]
    fn distinct_errors() {
        let f = GaugeField::<f64>::cold(LatticeGeometry::hypercube(2).unwrap());
        let h = header([2; 4]);
        let good = config_bytes(&h, &f, None).unwrap();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(parse_config(&bad, None), Err(Error::BadMagic)));
        let mut bad = good.clone();
        bad[6] = 9;
        assert!(matches!(
            parse_config(&bad, None),
            Err(Error::BadVersion { found: 9, .. })
        ));
        assert!(matches!(
            parse_config(&good[..good.len() - 1], None),
            Err(Error::Truncated { .. })
        ));
        // index 7 on a 6-element codebook (3 bits)
        let elems: Vec<Su2<f64>> = gen_subgroup::<f64>(Subgroup::Tetrahedral).elements()[..6].to_vec();
        let small = Mesh::from_elements(crate::digitize::MeshKind::Edgewise { level: 0 }, elems).unwrap();
        let hi = header([2; 4]).indexed(&small);
        let mut bytes = hi.to_bytes().to_vec();
        bytes.extend(pack(&vec![7u64; 64], 3));
        assert!(matches!(
            parse_config(&bytes, Some(&small)),
            Err(Error::IndexOutOfRange { index: 7, size: 6 })
        ));
    }

    #[test]
    fn fixed_point_round_trip() {
        for p in [2, 3, 5, 8, 20] {
            let spec = FixedPointSpec::new(p).unwrap();
            let f = project_fixed_point(&hot([2, 2, 2, 4], p as u64), spec);
            let h = header([2, 2, 2, 4]).fixed_point(spec);
            let bytes = config_bytes(&h, &f, None).unwrap();
            assert_eq!(bytes.len() - HEADER_LEN, (128 * (3 * p as usize + 2)).div_ceil(8));
            let (_, g) = parse_config(&bytes, None).unwrap();
            for (u, v) in f.links().iter().zip(g.links()) {
                assert_eq!(u.to_array().map(f64::to_bits), v.to_array().map(f64::to_bits));
            }
            assert!(g.is_off_manifold());
        }
        let spec = FixedPointSpec::new(4).unwrap();
        assert!(config_bytes(&header([2; 4]).fixed_point(spec), &hot([2; 4], 9), None).is_err());
    }
}
