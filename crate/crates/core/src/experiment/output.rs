//! CSV tables and run manifests.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::cut_probs::{CutProbabilityTable, CutRow};
use super::mse::{MseCurve, MsePoint};
use super::spec::ExperimentSpec;
use crate::error::{Error, Result};

pub const CUT_PROBS_FILE: &str = "cut_probs.csv";
pub const MSE_CURVE_FILE: &str = "mse_curve.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

fn write_rows<W: Write, T: Serialize>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: DeserializeOwned>(reader: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(reader).deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Columns `model,n,d,replicate,coordinate,ratio`; floats use the shortest
/// representation that reads back to the same bits.
pub fn write_cut_probs<W: Write>(table: &CutProbabilityTable, writer: W) -> Result<()> {
    write_rows(&table.rows, writer)
}

pub fn read_cut_probs<R: Read>(reader: R) -> Result<CutProbabilityTable> {
    Ok(CutProbabilityTable { rows: read_rows::<_, CutRow>(reader)? })
}

/// Columns `model,n,d,mse_mean,mse_stderr,replicates`.
pub fn write_mse_curve<W: Write>(curve: &MseCurve, writer: W) -> Result<()> {
    write_rows(&curve.points, writer)
}

pub fn read_mse_curve<R: Read>(reader: R) -> Result<Vec<MsePoint>> {
    read_rows(reader)
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub spec: ExperimentSpec,
}

impl Manifest {
    pub fn new(command: &str, spec: &ExperimentSpec) -> Self {
        Self { command: command.into(), version: env!("CARGO_PKG_VERSION").into(), seed: spec.seed, spec: spec.clone() }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = toml::to_string(self).expect("manifest serializes");
        File::create(path)?.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Reads an experiment spec, or the spec stored in a manifest written by an
/// earlier run.
pub fn load_spec(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(manifest) = toml::from_str::<Manifest>(&text) {
        manifest.spec.validate()?;
        return Ok(manifest.spec);
    }
    ExperimentSpec::from_toml_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::spec::PolicyKind;
    use crate::models::ModelKind;

    #[test]
    fn cut_table_round_trip_is_bit_exact() {
        let rows = (0..5)
            .map(|j| CutRow {
                model: "sinus".into(),
                n: 50,
                d: 5,
                replicate: 0,
                coordinate: j + 1,
                ratio: (j as f64 + 0.1) / 7.3,
            })
            .collect();
        let table = CutProbabilityTable { rows };
        let mut buf = Vec::new();
        write_cut_probs(&table, &mut buf).unwrap();
        assert!(buf.starts_with(b"model,n,d,replicate,coordinate,ratio\n"));
        let back = read_cut_probs(buf.as_slice()).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn manifest_reloads_as_spec() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ExperimentSpec::desk(ModelKind::Tree, PolicyKind::Cart, 99);
        let path = dir.path().join(MANIFEST_FILE);
        Manifest::new("mse-curve", &spec).save(&path).unwrap();
        assert_eq!(load_spec(&path).unwrap(), spec);
        let spec_path = dir.path().join("spec.toml");
        std::fs::write(&spec_path, spec.to_toml()).unwrap();
        assert_eq!(load_spec(&spec_path).unwrap(), spec);
    }
}
