//! Surface and report files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::families::{builtin, reduced_family, FamilySpec, Monomial, Surface};
use crate::gf::{Elem, Field, FieldSpec};

pub const REPORT_VERSION: u32 = 1;

/// On-disk form of a surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub family: String,
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    pub coefficients: BTreeMap<String, String>,
}

/// Resolves a family id: a built-in, or `<built-in>/reduced@<field>`.
pub fn family_by_id(id: &str, field: &Field) -> Result<Arc<FamilySpec>> {
    if let Some((base, _)) = id.split_once("/reduced@") {
        let fam = reduced_family(&builtin(base)?, field);
        if fam.id == id {
            return Ok(fam);
        }
        return Err(Error::UnknownFamily(id.to_string()));
    }
    builtin(id)
}

pub fn parse_field(lit: &str, modulus: Option<&[u32]>) -> Result<Arc<Field>> {
    match modulus {
        None => Field::parse(lit),
        Some(m) => {
            let spec = FieldSpec::parse(lit)?;
            let custom = FieldSpec::new(spec.characteristic(), m.to_vec())?;
            if custom.order() != spec.order() {
                return Err(Error::BadFieldLiteral(lit.to_string()));
            }
            Ok(Field::new(custom))
        }
    }
}

impl SurfaceFile {
    pub fn from_surface(s: &Surface) -> Self {
        let field = s.field();
        let canonical = Field::canonical(field.characteristic(), field.degree()).ok();
        let modulus = match canonical {
            Some(c) if c.spec() == field.spec() => None,
            _ => Some(field.spec().modulus().to_vec()),
        };
        SurfaceFile {
            family: s.family().id.clone(),
            field: field.spec().literal(),
            modulus,
            coefficients: s
                .family()
                .free
                .iter()
                .zip(s.coefficients())
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.key(), field.format(*c)))
                .collect(),
        }
    }

    /// Builds the surface; `origin` names the source in error messages.
    pub fn to_surface(&self, origin: &str) -> Result<Surface> {
        let at = |field: &str| format!("{origin}: {field}");
        let field = parse_field(&self.field, self.modulus.as_deref())
            .map_err(|e| Error::schema(at("field"), e.to_string()))?;
        let family =
            family_by_id(&self.family, &field).map_err(|e| Error::schema(at("family"), e.to_string()))?;
        let mut coeffs = vec![Elem::ZERO; family.slot_count()];
        for (key, lit) in &self.coefficients {
            let path = at(&format!("coefficients.{key}"));
            let m: Monomial = key.parse().map_err(|_| Error::schema(&path, "bad monomial key"))?;
            let slot = family
                .slot_of(&m)
                .ok_or_else(|| Error::schema(&path, format!("not a free monomial of {}", family.id)))?;
            coeffs[slot] = field.parse_element(lit).map_err(|e| Error::schema(&path, e.to_string()))?;
        }
        Surface::new(family, field, coeffs)
    }
}

pub fn load_surface(path: &Path) -> Result<Surface> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: SurfaceFile =
        serde_json::from_str(&text).map_err(|e| Error::Json { path: path.into(), source: e })?;
    file.to_surface(&path.display().to_string())
}

pub fn save_surface(s: &Surface, path: &Path) -> Result<()> {
    write_json(path, &SurfaceFile::from_surface(s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

impl Timestamps {
    pub fn now() -> u128 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
    }
}

/// Versioned envelope for every command output. Only `timestamps` varies
/// between identical runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile<T> {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub input_hashes: BTreeMap<String, String>,
    pub payload: T,
    pub timestamps: Timestamps,
}

impl<T> ReportFile<T> {
    pub fn new(command: Vec<String>, payload: T, started_unix_ms: u128) -> Self {
        ReportFile {
            schema_version: REPORT_VERSION,
            command,
            input_hashes: BTreeMap::new(),
            payload,
            timestamps: Timestamps { started_unix_ms, finished_unix_ms: Timestamps::now() },
        }
    }

    pub fn with_input(mut self, path: &Path) -> Result<Self> {
        self.input_hashes.insert(path.display().to_string(), hash_file(path)?);
        Ok(self)
    }
}

pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn save_report<T: Serialize>(report: &ReportFile<T>, path: &Path) -> Result<()> {
    write_json(path, report)
}

pub fn load_report<T: DeserializeOwned>(path: &Path) -> Result<ReportFile<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report: ReportFile<T> =
        serde_json::from_str(&text).map_err(|e| Error::Json { path: path.into(), source: e })?;
    if report.schema_version != REPORT_VERSION {
        return Err(Error::schema(
            path.display().to_string(),
            format!("unsupported report version {}", report.schema_version),
        ));
    }
    Ok(report)
}

/// Pretty JSON written through a temporary file.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut json =
        serde_json::to_string_pretty(value).map_err(|e| Error::Json { path: path.into(), source: e })?;
    json.push('\n');
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, json).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn surface_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (id, lit) in [("DP2_CHAR2", "4"), ("DP2_CLASSIC", "5"), ("DP1_CHAR2", "2^3")] {
            let field = Field::parse(lit).unwrap();
            let fam = builtin(id).unwrap();
            let coeffs = (0..fam.slot_count()).map(|_| Elem(rng.random_range(0..field.order()))).collect();
            let s = Surface::new(fam, field, coeffs).unwrap();
            let path = dir.path().join("s.json");
            save_surface(&s, &path).unwrap();
            assert_eq!(load_surface(&path).unwrap(), s);
        }
        let field = Field::parse("3").unwrap();
        let fam = reduced_family(&builtin("DP1_CHAR3").unwrap(), &field);
        let s = Surface::new(fam.clone(), field, vec![Elem(2); fam.slot_count()]).unwrap();
        let path = dir.path().join("r.json");
        save_surface(&s, &path).unwrap();
        assert_eq!(load_surface(&path).unwrap(), s);
    }

    #[test]
    fn custom_modulus_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let field = Field::new(FieldSpec::new(3, vec![2, 2, 1]).unwrap());
        let s = Surface::new(builtin("CUBIC_P3").unwrap(), field, vec![Elem(5); 20]).unwrap();
        let path = dir.path().join("m.json");
        save_surface(&s, &path).unwrap();
        assert_eq!(load_surface(&path).unwrap(), s);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let file = |field: &str, coeffs: &[(&str, &str)]| SurfaceFile {
            family: "CUBIC_P3".into(),
            field: field.into(),
            modulus: None,
            coefficients: coeffs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        };
        let err = file("2^0", &[]).to_surface("in").unwrap_err().to_string();
        assert!(err.contains("in: field"), "{err}");
        let err = file("2", &[("1.0.0.9", "1")]).to_surface("in").unwrap_err().to_string();
        assert!(err.contains("coefficients.1.0.0.9"), "{err}");
        let err = file("2", &[("1.0.0.2", "2")]).to_surface("in").unwrap_err().to_string();
        assert!(err.contains("coefficients.1.0.0.2"), "{err}");
        let mut f = file("2", &[]);
        f.family = "DP9".into();
        assert!(f.to_surface("in").unwrap_err().to_string().contains("in: family"));
    }

    #[test]
    fn report_envelope_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let rep = ReportFile::new(vec!["weil".into()], vec![1u32, 2, 3], 5);
        save_report(&rep, &path).unwrap();
        let back: ReportFile<Vec<u32>> = load_report(&path).unwrap();
        assert_eq!(back, rep);
        assert!(load_surface(&dir.path().join("missing.json")).is_err());
    }
}
