//! Files on disk: fixed-format numbers, atomic writes, wavefunction dumps,
//! the eigenvector cache and run manifests.
//!
//! Raw vectors are stored as an 8-byte little-endian length followed by that
//! many little-endian `f64`s. Each cached vector `<key>.f64` has a sidecar
//! `<key>.sha256` holding the SHA-256 of the vector file; a mismatch is
//! reported as corruption rather than silently recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{solve_ground_state, GroundState, GroundStateSource};
use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::space::{SpaceGraph, SpaceSpec};

/// Nine significant digits in scientific notation; NaN prints as `NaN`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.8e}")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(
        ".{name}.{}.{}.tmp",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// CSV with columns `site_id, sheet, x[, y[, z]], radius, amplitude`; the
/// junction's sheet is `-1`.
pub fn write_wavefunction_csv<W: Write>(graph: &SpaceGraph, psi: &[f64], mut out: W) -> Result<()> {
    if psi.len() != graph.site_count() {
        return Err(Error::LengthMismatch {
            expected: graph.site_count(),
            got: psi.len(),
        });
    }
    let axes = ["x", "y", "z"];
    let dim = graph.spec().dim;
    writeln!(
        out,
        "site_id,sheet,{},radius,amplitude",
        axes[..dim].join(",")
    )?;
    for (site, amp) in psi.iter().enumerate() {
        let geo = graph.geometry(site);
        let sheet = geo.sheet.map_or(-1, |s| s as i64);
        let coords: Vec<String> = graph.coords(site).iter().map(|c| c.to_string()).collect();
        writeln!(
            out,
            "{site},{sheet},{},{},{}",
            coords.join(","),
            fmt_float(geo.radius),
            fmt_float(*amp)
        )?;
    }
    Ok(())
}

pub fn encode_vector(v: &[f64]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(8 + 8 * v.len());
    bytes.extend_from_slice(&(v.len() as u64).to_le_bytes());
    for x in v {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    bytes
}

pub fn decode_vector(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() < 8 {
        return Err(Error::CacheCorrupt(
            "vector file shorter than its header".into(),
        ));
    }
    let (head, body) = bytes.split_at(8);
    let n = u64::from_le_bytes(head.try_into().expect("8 bytes")) as usize;
    if body.len() != n.saturating_mul(8) {
        return Err(Error::CacheCorrupt(format!(
            "header declares {n} values but {} bytes follow",
            body.len()
        )));
    }
    Ok(body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

/// Directory of raw eigenvectors keyed by a content hash.
#[derive(Debug)]
pub struct VectorCache {
    dir: PathBuf,
    writer: Mutex<()>,
}

impl VectorCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            writer: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn vector_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.f64"))
    }

    fn digest_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.sha256"))
    }

    /// `Ok(None)` when absent; `CacheCorrupt` when present but damaged.
    pub fn load(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let path = self.vector_path(key);
        if !path.exists() {
            return Ok(None);
        }
        let bytes = fs::read(&path)?;
        let want = fs::read_to_string(self.digest_path(key)).map_err(|_| {
            Error::CacheCorrupt(format!("{} has no readable digest", path.display()))
        })?;
        if want.trim() != sha256_hex(&bytes) {
            return Err(Error::CacheCorrupt(format!(
                "{} does not match its recorded digest",
                path.display()
            )));
        }
        decode_vector(&bytes).map(Some)
    }

    pub fn store(&self, key: &str, v: &[f64]) -> Result<()> {
        let bytes = encode_vector(v);
        let digest = sha256_hex(&bytes);
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        write_atomic(&self.vector_path(key), &bytes)?;
        write_atomic(&self.digest_path(key), format!("{digest}\n").as_bytes())
    }
}

/// Everything that determines a ground-state solve.
#[derive(Debug, Clone, Serialize)]
struct SolveKey<'a> {
    format: u32,
    spec: &'a SpaceSpec,
    hopping: f64,
    tol: Option<f64>,
    seed: u64,
}

/// Cache key of a solve: SHA-256 of its canonical JSON description.
pub fn solve_key(spec: &SpaceSpec, hopping: f64, options: &EigenOptions) -> String {
    let key = SolveKey {
        format: 1,
        spec,
        hopping,
        tol: options.tol,
        seed: options.seed,
    };
    sha256_hex(&serde_json::to_vec(&key).expect("plain data serializes"))
}

/// A solver that reuses cached eigenvectors when they still satisfy the
/// residual tolerance and stores fresh ones.
#[derive(Debug)]
pub struct CachedSolver {
    pub hopping: f64,
    pub options: EigenOptions,
    pub cache: VectorCache,
}

impl GroundStateSource for CachedSolver {
    fn hopping(&self) -> f64 {
        self.hopping
    }

    fn ground_state(&self, spec: &SpaceSpec) -> Result<GroundState> {
        let key = solve_key(spec, self.hopping, &self.options);
        let cached = self.cache.load(&key)?;
        let gs = solve_ground_state(spec, self.hopping, &self.options, cached)?;
        if gs.iterations > 0 {
            self.cache.store(&key, &gs.state)?;
        }
        Ok(gs)
    }
}

/// Record of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Spec and study parameters, keyed by flag name.
    pub parameters: serde_json::Value,
    pub solver: EigenOptions,
    pub hopping: f64,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    /// SHA-256 over command, parameters, solver options and hopping.
    pub input_hash: String,
}

impl RunManifest {
    pub fn new(
        command: &str,
        parameters: serde_json::Value,
        solver: EigenOptions,
        hopping: f64,
    ) -> Self {
        let input = serde_json::json!({
            "command": command,
            "parameters": parameters,
            "solver": solver,
            "hopping": hopping,
        });
        let input_hash = sha256_hex(&serde_json::to_vec(&input).expect("plain data serializes"));
        Self {
            command: command.to_string(),
            parameters,
            solver,
            hopping,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: 0.0,
            outputs: Vec::new(),
            input_hash,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, serde_json::to_string_pretty(self)?.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::DirectSolver;
    use crate::space::build_space;

    #[test]
    fn float_format_is_fixed() {
        assert_eq!(fmt_float(-2.309_401_076_758_503), "-2.30940108e0");
        assert_eq!(fmt_float(0.0), "0.00000000e0");
        assert_eq!(fmt_float(f64::NAN), "NaN");
        assert_eq!(fmt_float(1.5e-12), "1.50000000e-12");
    }

    #[test]
    fn vector_round_trip() {
        let v = vec![1.0, -0.5, f64::MIN_POSITIVE, 3.25e10];
        let bytes = encode_vector(&v);
        assert_eq!(bytes.len(), 8 + 32);
        assert_eq!(&bytes[..8], &4u64.to_le_bytes());
        assert_eq!(decode_vector(&bytes).unwrap(), v);
        assert!(decode_vector(&bytes[..20]).is_err());
        assert!(decode_vector(&bytes[..4]).is_err());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        let leftovers = fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 1);
    }

    #[test]
    fn cache_detects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = VectorCache::new(dir.path()).unwrap();
        assert!(cache.load("abc").unwrap().is_none());
        cache.store("abc", &[1.0, 2.0]).unwrap();
        assert_eq!(cache.load("abc").unwrap().unwrap(), vec![1.0, 2.0]);
        let path = cache.vector_path("abc");
        let mut bytes = fs::read(&path).unwrap();
        bytes[12] ^= 0x40;
        fs::write(&path, bytes).unwrap();
        assert!(matches!(cache.load("abc"), Err(Error::CacheCorrupt(_))));
    }

    #[test]
    fn cached_solver_reuses_and_agrees() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SpaceSpec::singular(2, 16, 3);
        let solver = CachedSolver {
            hopping: 1.0,
            options: EigenOptions::default(),
            cache: VectorCache::new(dir.path()).unwrap(),
        };
        let first = solver.ground_state(&spec).unwrap();
        assert!(first.iterations > 0);
        let second = solver.ground_state(&spec).unwrap();
        assert_eq!(second.iterations, 0);
        let fresh = DirectSolver::default().ground_state(&spec).unwrap();
        let diff = first
            .state
            .iter()
            .zip(&fresh.state)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8);
        assert!(second.residual <= second.tol);
    }

    #[test]
    fn keys_separate_specs() {
        let o = EigenOptions::default();
        let a = solve_key(&SpaceSpec::singular(2, 16, 3), 1.0, &o);
        let b = solve_key(&SpaceSpec::singular(2, 16, 4), 1.0, &o);
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
        assert_eq!(a, solve_key(&SpaceSpec::singular(2, 16, 3), 1.0, &o));
    }

    #[test]
    fn wavefunction_csv_columns() {
        let g = build_space(&SpaceSpec::singular(2, 4, 2)).unwrap();
        let psi = vec![0.0; g.site_count()];
        let mut buf = Vec::new();
        write_wavefunction_csv(&g, &psi, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "site_id,sheet,x,y,radius,amplitude");
        assert!(lines.next().unwrap().starts_with("0,-1,0,0,"));
        assert_eq!(text.lines().count(), g.site_count() + 1);
    }

    #[test]
    fn manifest_hash_ignores_timing() {
        let p = serde_json::json!({"dim": 2, "degree": 3});
        let mut a = RunManifest::new("solve", p.clone(), EigenOptions::default(), 1.0);
        let b = RunManifest::new("solve", p, EigenOptions::default(), 1.0);
        a.wall_time_s = 3.0;
        assert_eq!(a.input_hash, b.input_hash);
        let c = RunManifest::new(
            "profile",
            serde_json::json!({}),
            EigenOptions::default(),
            1.0,
        );
        assert_ne!(a.input_hash, c.input_hash);
    }
}
