//! File formats. Every file carries `"format": 1`.
//!
//! * group file: `{"format": 1, "H": …, "K": …, "tau": …}`
//! * function file: `{"format": 1, "group": PATH | {inline group}, "values": [[[re, im], …] per H row], "p"?: …}`
//! * K-function file: the same with a single row of length `|K|`
//! * grid file: `{"format": 1, "dx", "x0", "n", "q", "m", "delta"?}`
//!
//! Exact scalars are written as `"p/q"` strings, floating ones as numbers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::continuum::GridSpec;
use crate::error::{Error, Result};
use crate::function::{GFunction, KFunction};
use crate::group::{ActionSpec, FiniteGroup, GroupSpec, SemidirectGroup, SemidirectSpec};
use crate::norm::Exponent;
use crate::scalar::{GaussQ, Rational, Scalar};

pub const FORMAT_VERSION: u32 = 1;

/// Scalars that round-trip through the file formats.
pub trait ScalarIo: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

fn pair(v: &Value) -> Result<(&Value, &Value)> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok((re, im)),
        _ => Err(Error::Format(format!("expected [re, im], got {v}"))),
    }
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => s.parse().map_err(|e| Error::Format(format!("{e}"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::new(i, 1))
            } else {
                n.as_f64()
                    .and_then(Rational::from_f64)
                    .ok_or_else(|| Error::Format(format!("bad number {n}")))
            }
        }
        other => Err(Error::Format(format!("expected a number or \"p/q\", got {other}"))),
    }
}

impl ScalarIo for GaussQ {
    fn to_json(&self) -> Value {
        json!([self.re.to_string(), self.im.to_string()])
    }

    fn from_json(v: &Value) -> Result<GaussQ> {
        let (re, im) = pair(v)?;
        Ok(GaussQ::new(rational_from_json(re)?, rational_from_json(im)?))
    }
}

impl ScalarIo for Complex64 {
    fn to_json(&self) -> Value {
        json!([self.re, self.im])
    }

    fn from_json(v: &Value) -> Result<Complex64> {
        let (re, im) = pair(v)?;
        let part = |x: &Value| match x {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::Format(format!("bad number {n}"))),
            other => rational_from_json(other).map(|r| r.to_f64()),
        };
        Ok(Complex64::new(part(re)?, part(im)?))
    }
}

fn check_format(v: &Value) -> Result<()> {
    match v.get("format") {
        None => Ok(()),
        Some(f) if f.as_u64() == Some(FORMAT_VERSION as u64) => Ok(()),
        Some(f) => Err(Error::Format(format!("unsupported format version {f}"))),
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let mut file = fs::File::create(&tmp)?;
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn parse_group_spec(v: &Value) -> Result<SemidirectSpec> {
    check_format(v)?;
    let mut body = v.clone();
    if let Some(obj) = body.as_object_mut() {
        obj.remove("format");
    }
    Ok(serde_json::from_value(body)?)
}

pub fn read_group_spec(path: &Path) -> Result<SemidirectSpec> {
    parse_group_spec(&read_json(path)?)
}

pub fn group_spec_json(spec: &SemidirectSpec) -> Value {
    let mut v = serde_json::to_value(spec).expect("spec serializes");
    v.as_object_mut()
        .expect("spec is an object")
        .insert("format".into(), json!(FORMAT_VERSION));
    v
}

pub fn write_group_spec(path: &Path, spec: &SemidirectSpec) -> Result<()> {
    write_json(path, &group_spec_json(spec))
}

/// A spec rebuilding `group` exactly: cyclic factors stay symbolic,
/// everything else is written as tables.
pub fn spec_of(group: &SemidirectGroup) -> SemidirectSpec {
    let factor = |g: &FiniteGroup| {
        if g.is_standard_cyclic() {
            GroupSpec::Cyclic { n: g.order() }
        } else {
            GroupSpec::Table { cayley: g.cayley() }
        }
    };
    SemidirectSpec {
        h: factor(group.h()),
        k: factor(group.k()),
        tau: ActionSpec::Table {
            perm: group.action().tables().to_vec(),
        },
    }
}

fn same_factor(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    a.order() == b.order()
        && ((a.is_standard_cyclic() && b.is_standard_cyclic()) || a.cayley() == b.cayley())
}

/// Equality of group laws and action, ignoring labels.
pub fn same_structure(a: &SemidirectGroup, b: &SemidirectGroup) -> bool {
    same_factor(a.h(), b.h()) && same_factor(a.k(), b.k()) && a.action().tables() == b.action().tables()
}

/// The `"group"` entry of a function file: a path or an inline spec.
#[derive(Clone, Debug)]
pub enum GroupRef {
    Path(PathBuf),
    Inline(SemidirectSpec),
}

impl GroupRef {
    fn to_json(&self) -> Value {
        match self {
            GroupRef::Path(p) => json!(p.to_string_lossy()),
            GroupRef::Inline(spec) => group_spec_json(spec),
        }
    }

    fn resolve(v: &Value, base: &Path) -> Result<SemidirectSpec> {
        match v {
            Value::String(p) => {
                let p = Path::new(p);
                read_group_spec(&if p.is_absolute() { p.to_path_buf() } else { base.join(p) })
            }
            Value::Object(_) => parse_group_spec(v),
            other => Err(Error::Format(format!("\"group\" must be a path or object, got {other}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionFile {
    #[serde(default = "default_format")]
    format: u32,
    group: Value,
    values: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Exponent>,
}

fn default_format() -> u32 {
    FORMAT_VERSION
}

/// A parsed function file before it is bound to a group.
pub struct LoadedFunction<S> {
    pub spec: SemidirectSpec,
    pub rows: Vec<Vec<S>>,
    pub p: Option<Exponent>,
}

pub fn parse_function<S: ScalarIo>(v: &Value, base: &Path) -> Result<LoadedFunction<S>> {
    check_format(v)?;
    let file: FunctionFile = serde_json::from_value(v.clone())?;
    let spec = GroupRef::resolve(&file.group, base)?;
    let rows = file
        .values
        .iter()
        .map(|row| row.iter().map(S::from_json).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let p = file.p.map(Exponent::validate).transpose()?;
    Ok(LoadedFunction { spec, rows, p })
}

pub fn read_function<S: ScalarIo>(path: &Path) -> Result<LoadedFunction<S>> {
    let base = path.parent().unwrap_or(Path::new("."));
    parse_function(&read_json(path)?, base)
}

impl<S: Scalar> LoadedFunction<S> {
    /// Binds the rows to `group`, which must match the file's own group.
    pub fn into_gfunction(self, group: &Arc<SemidirectGroup>) -> Result<GFunction<S>> {
        let own = self.spec.build()?;
        if !same_structure(&own, group) {
            return Err(Error::GroupMismatch);
        }
        let nk = group.k().order();
        if self.rows.len() != group.h().order() || self.rows.iter().any(|r| r.len() != nk) {
            return Err(Error::Structural(format!(
                "function needs {} rows of {} values",
                group.h().order(),
                nk
            )));
        }
        GFunction::from_values(group, self.rows.into_iter().flatten().collect())
    }

    pub fn into_kfunction(self, group: &Arc<SemidirectGroup>) -> Result<KFunction<S>> {
        let own = self.spec.build()?;
        if !same_factor(own.k(), group.k()) {
            return Err(Error::GroupMismatch);
        }
        match <[Vec<S>; 1]>::try_from(self.rows) {
            Ok([row]) => KFunction::from_values(group.k_arc(), row),
            Err(rows) => Err(Error::Structural(format!(
                "K-function file needs one row, found {}",
                rows.len()
            ))),
        }
    }
}

pub fn gfunction_json<S: ScalarIo>(f: &GFunction<S>, group: &GroupRef, p: Option<Exponent>) -> Value {
    let nh = f.group().h().order();
    let file = FunctionFile {
        format: FORMAT_VERSION,
        group: group.to_json(),
        values: (0..nh).map(|h| f.row(h).iter().map(S::to_json).collect()).collect(),
        p,
    };
    serde_json::to_value(file).expect("function file serializes")
}

pub fn kfunction_json<S: ScalarIo>(phi: &KFunction<S>, group: &GroupRef) -> Value {
    let file = FunctionFile {
        format: FORMAT_VERSION,
        group: group.to_json(),
        values: vec![phi.values().iter().map(S::to_json).collect()],
        p: None,
    };
    serde_json::to_value(file).expect("function file serializes")
}

pub fn write_gfunction<S: ScalarIo>(
    path: &Path,
    f: &GFunction<S>,
    group: &GroupRef,
    p: Option<Exponent>,
) -> Result<()> {
    write_json(path, &gfunction_json(f, group, p))
}

pub fn write_kfunction<S: ScalarIo>(path: &Path, phi: &KFunction<S>, group: &GroupRef) -> Result<()> {
    write_json(path, &kfunction_json(phi, group))
}

pub fn parse_grid(v: &Value) -> Result<GridSpec> {
    check_format(v)?;
    let mut body = v.clone();
    if let Some(obj) = body.as_object_mut() {
        obj.remove("format");
    }
    let grid: GridSpec = serde_json::from_value(body)?;
    grid.validated()
}

pub fn read_grid(path: &Path) -> Result<GridSpec> {
    parse_grid(&read_json(path)?)
}
