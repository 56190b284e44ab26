use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::solver::{Params, State};

const MAGIC: &[u8; 8] = b"HLSNAP01";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    t: f64,
    grid: GridSpec,
    params: Params,
    fields: Vec<String>,
    byte_order: String,
    layout: String,
    scalar: String,
}

/// Named fields at one time, stored as a JSON header followed by raw
/// little-endian `f64` payloads in x-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub grid: GridSpec,
    pub params: Params,
    pub fields: Vec<(String, Field)>,
}

impl Snapshot {
    pub fn from_state(state: &State, params: &Params) -> Self {
        let mut fields = vec![
            ("w".to_string(), state.w.clone()),
            ("u".to_string(), state.u.clone()),
            ("v".to_string(), state.v.clone()),
        ];
        if let Some(b) = &state.b {
            fields.push(("b".to_string(), b.clone()));
        }
        Snapshot {
            t: state.t,
            grid: *state.grid(),
            params: *params,
            fields,
        }
    }

    pub fn field(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let header = Header {
            t: self.t,
            grid: self.grid,
            params: self.params,
            fields: self.fields.iter().map(|(n, _)| n.clone()).collect(),
            byte_order: "little".into(),
            layout: "x_major".into(),
            scalar: "f64".into(),
        };
        let json = serde_json::to_vec(&header).map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(MAGIC)?;
        out.write_all(&(json.len() as u64).to_le_bytes())?;
        out.write_all(&json)?;
        for (_, f) in &self.fields {
            let mut buf = Vec::with_capacity(8 * f.values().len());
            for v in f.values() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Io("not a snapshot file".into()));
        }
        let mut len = [0u8; 8];
        input.read_exact(&mut len)?;
        let mut json = vec![0u8; u64::from_le_bytes(len) as usize];
        input.read_exact(&mut json)?;
        let header: Header = serde_json::from_slice(&json).map_err(|e| Error::Io(e.to_string()))?;
        if header.byte_order != "little" || header.layout != "x_major" || header.scalar != "f64" {
            return Err(Error::Io("unsupported snapshot encoding".into()));
        }
        let n = header.grid.len();
        let mut fields = Vec::with_capacity(header.fields.len());
        let mut buf = vec![0u8; 8 * n];
        for name in header.fields {
            input.read_exact(&mut buf)?;
            let values = buf
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            fields.push((name, Field::from_values(header.grid, values)?));
        }
        Ok(Snapshot {
            t: header.t,
            grid: header.grid,
            params: header.params,
            fields,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Snapshot::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
