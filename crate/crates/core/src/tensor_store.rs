//! Weight tensors as named segments, stored as a JSON manifest plus a raw
//! little-endian `f32` blob.
//!
//! ```json
//! { "blob": "weights.bin",
//!   "segments": [ { "name": "fc1", "shape": [64, 784], "dtype": "f32",
//!                   "offset": 0, "count": 50176, "skip": false } ] }
//! ```
//!
//! `offset` and `count` are in elements. The blob path is relative to the
//! manifest's directory. Values are widened to `f64` on load.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    pub l1_norm: f64,
    /// Excluded from compression; passed through verbatim.
    pub skip: bool,
}

impl Segment {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        let expected: usize = shape.iter().product();
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::param(format!(
                "segment {name}: shape must be a list of positive integers"
            )));
        }
        if expected != values.len() {
            return Err(Error::LengthMismatch {
                expected,
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                segment: name,
                index,
            });
        }
        let l1_norm = l1(&values);
        Ok(Self {
            name,
            shape,
            values,
            l1_norm,
            skip: false,
        })
    }

    pub fn with_skip(mut self, skip: bool) -> Self {
        self.skip = skip;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn l1(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSet {
    segments: Vec<Segment>,
}

impl WeightSet {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::NoSegments);
        }
        let mut names = HashSet::new();
        for s in &segments {
            if !names.insert(s.name.as_str()) {
                return Err(Error::Manifest(format!("duplicate segment name {}", s.name)));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn into_segments(self) -> Vec<Segment> {
        self.segments
    }

    pub fn total_n(&self) -> usize {
        self.segments.iter().map(Segment::len).sum()
    }

    pub fn get(&self, name: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.name == name)
    }
}

/// Shape and norm of one segment, without its values.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentMeta {
    pub name: String,
    pub shape: Vec<usize>,
    pub l1_norm: f64,
    pub skip: bool,
}

impl SegmentMeta {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Everything needed to map a flat normalized vector back to segments.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentLayout {
    pub segments: Vec<SegmentMeta>,
}

impl SegmentLayout {
    /// Number of compressed entries (skipped segments excluded).
    pub fn n(&self) -> usize {
        self.retained().map(SegmentMeta::len).sum()
    }

    pub fn retained(&self) -> impl Iterator<Item = &SegmentMeta> {
        self.segments.iter().filter(|s| !s.skip)
    }

    /// Start offsets of each retained segment in the flat vector, followed
    /// by `n`.
    pub fn boundaries(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut acc = 0;
        for s in self.retained() {
            out.push(acc);
            acc += s.len();
        }
        out.push(acc);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedVector {
    pub values: Vec<f64>,
    pub layout: SegmentLayout,
}

impl NormalizedVector {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn segment_boundaries(&self) -> Vec<usize> {
        self.layout.boundaries()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.layout.retained().map(|s| s.l1_norm).collect()
    }

    /// A single-segment vector taken as already normalized. Useful for
    /// synthetic sources, where the samples themselves are the source.
    pub fn from_raw(values: Vec<f64>) -> Self {
        let n = values.len();
        Self {
            values,
            layout: SegmentLayout {
                segments: vec![SegmentMeta {
                    name: "source".into(),
                    shape: vec![n],
                    l1_norm: 1.0,
                    skip: false,
                }],
            },
        }
    }
}

/// Divide every retained segment by its entrywise ℓ1 norm.
pub fn normalize(ws: &WeightSet) -> Result<NormalizedVector> {
    let mut values = Vec::with_capacity(ws.total_n());
    let mut metas = Vec::with_capacity(ws.segments.len());
    for s in &ws.segments {
        if !s.skip {
            if s.l1_norm <= 0.0 {
                return Err(Error::ZeroNorm(s.name.clone()));
            }
            values.extend(s.values.iter().map(|v| v / s.l1_norm));
        }
        metas.push(SegmentMeta {
            name: s.name.clone(),
            shape: s.shape.clone(),
            l1_norm: s.l1_norm,
            skip: s.skip,
        });
    }
    if values.is_empty() {
        return Err(Error::param("every segment is marked skip"));
    }
    Ok(NormalizedVector {
        values,
        layout: SegmentLayout { segments: metas },
    })
}

/// Multiply each retained segment of `reconstructed` by its stored norm.
/// Skipped segments come back zero-filled; see [`pass_through`].
pub fn denormalize(layout: &SegmentLayout, reconstructed: &[f64]) -> Result<WeightSet> {
    let n = layout.n();
    if reconstructed.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: reconstructed.len(),
        });
    }
    let mut cursor = 0;
    let mut segments = Vec::with_capacity(layout.segments.len());
    for meta in &layout.segments {
        let len = meta.len();
        let values = if meta.skip {
            vec![0.0; len]
        } else {
            let v = reconstructed[cursor..cursor + len]
                .iter()
                .map(|x| x * meta.l1_norm)
                .collect();
            cursor += len;
            v
        };
        segments.push(Segment::new(meta.name.clone(), meta.shape.clone(), values)?.with_skip(meta.skip));
    }
    WeightSet::new(segments)
}

/// Copy skipped segments verbatim from `original` into `target`.
pub fn pass_through(target: &mut WeightSet, original: &WeightSet) -> Result<()> {
    for seg in target.segments.iter_mut().filter(|s| s.skip) {
        let src = original
            .get(&seg.name)
            .ok_or_else(|| Error::Manifest(format!("segment {} missing from original", seg.name)))?;
        if src.shape != seg.shape {
            return Err(Error::Manifest(format!("segment {} changed shape", seg.name)));
        }
        seg.values.clone_from(&src.values);
        seg.l1_norm = src.l1_norm;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    blob: String,
    segments: Vec<ManifestSegment>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestSegment {
    name: String,
    shape: Vec<usize>,
    dtype: String,
    offset: usize,
    count: usize,
    #[serde(default)]
    skip: bool,
}

pub fn load_manifest(manifest_path: &Path) -> Result<WeightSet> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: ManifestFile =
        serde_json::from_str(&text).map_err(|e| Error::Manifest(e.to_string()))?;
    if manifest.segments.is_empty() {
        return Err(Error::NoSegments);
    }
    let blob_path = manifest_dir(manifest_path).join(&manifest.blob);
    let blob = fs::read(&blob_path).map_err(|e| Error::io(&blob_path, e))?;
    if blob.len() % 4 != 0 {
        return Err(Error::BlobLength(format!(
            "{} bytes is not a whole number of f32 values",
            blob.len()
        )));
    }
    let available = blob.len() / 4;

    let mut segments = Vec::with_capacity(manifest.segments.len());
    for entry in manifest.segments {
        if entry.dtype != "f32" {
            return Err(Error::Manifest(format!(
                "segment {}: unsupported dtype {:?}",
                entry.name, entry.dtype
            )));
        }
        let want: usize = entry.shape.iter().product();
        if want != entry.count {
            return Err(Error::Manifest(format!(
                "segment {}: shape {:?} holds {want} values but count is {}",
                entry.name, entry.shape, entry.count
            )));
        }
        let end = entry
            .offset
            .checked_add(entry.count)
            .filter(|&end| end <= available)
            .ok_or_else(|| {
                Error::BlobLength(format!(
                    "segment {} needs elements {}..{} but blob has {available}",
                    entry.name,
                    entry.offset,
                    entry.offset.saturating_add(entry.count)
                ))
            })?;
        let values = blob[entry.offset * 4..end * 4]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        segments.push(Segment::new(entry.name, entry.shape, values)?.with_skip(entry.skip));
    }
    WeightSet::new(segments)
}

/// Write `ws` as a manifest at `manifest_path` and a blob named `blob_name`
/// next to it. Segments are laid out contiguously in order.
pub fn save_manifest(ws: &WeightSet, manifest_path: &Path, blob_name: &str) -> Result<()> {
    let mut blob = Vec::with_capacity(ws.total_n() * 4);
    let mut entries = Vec::with_capacity(ws.segments.len());
    let mut offset = 0;
    for s in &ws.segments {
        for &v in &s.values {
            blob.extend_from_slice(&(v as f32).to_le_bytes());
        }
        entries.push(ManifestSegment {
            name: s.name.clone(),
            shape: s.shape.clone(),
            dtype: "f32".into(),
            offset,
            count: s.len(),
            skip: s.skip,
        });
        offset += s.len();
    }
    let manifest = ManifestFile {
        blob: blob_name.to_string(),
        segments: entries,
    };
    let blob_path = manifest_dir(manifest_path).join(blob_name);
    fs::write(&blob_path, &blob).map_err(|e| Error::io(&blob_path, e))?;
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Manifest(e.to_string()))?;
    text.push('\n');
    fs::write(manifest_path, text).map_err(|e| Error::io(manifest_path, e))
}

fn manifest_dir(manifest_path: &Path) -> PathBuf {
    manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default()
}
