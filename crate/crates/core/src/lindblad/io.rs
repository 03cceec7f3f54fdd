//! JSON layouts for generators and states. Complex numbers are `[re, im]`
//! pairs and matrices are flattened row-major.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, Channel, DensityMatrix, GkslGenerator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub jump: Vec<[f64; 2]>,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    pub dim: usize,
    pub hamiltonian: Vec<[f64; 2]>,
    #[serde(default)]
    pub channels: Vec<ChannelFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

fn to_matrix(dim: usize, flat: &[[f64; 2]], what: &str) -> Result<CMatrix> {
    if flat.len() != dim * dim {
        return Err(Error::validation(format!(
            "{what}: expected {} entries for dimension {dim}, got {}",
            dim * dim,
            flat.len()
        )));
    }
    let entries: Vec<Complex64> = flat.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    Ok(CMatrix::from_row_slice(dim, dim, &entries))
}

fn to_flat(m: &CMatrix) -> Vec<[f64; 2]> {
    m.transpose().iter().map(|z| [z.re, z.im]).collect()
}

impl GeneratorFile {
    pub fn into_generator(self) -> Result<GkslGenerator> {
        let h = to_matrix(self.dim, &self.hamiltonian, "hamiltonian")?;
        let channels = self
            .channels
            .iter()
            .enumerate()
            .map(|(k, ch)| {
                Ok(Channel { jump: to_matrix(self.dim, &ch.jump, &format!("channels[{k}].jump"))?, rate: ch.rate })
            })
            .collect::<Result<Vec<_>>>()?;
        GkslGenerator::new(h, channels)
    }
}

impl From<&GkslGenerator> for GeneratorFile {
    fn from(gen: &GkslGenerator) -> Self {
        GeneratorFile {
            dim: gen.dim(),
            hamiltonian: to_flat(gen.hamiltonian()),
            channels: gen.channels().iter().map(|ch| ChannelFile { jump: to_flat(&ch.jump), rate: ch.rate }).collect(),
        }
    }
}

impl StateFile {
    pub fn into_state(self) -> Result<DensityMatrix> {
        DensityMatrix::new(to_matrix(self.dim, &self.entries, "entries")?)
    }
}

impl From<&DensityMatrix> for StateFile {
    fn from(rho: &DensityMatrix) -> Self {
        StateFile { dim: rho.dim(), entries: to_flat(rho.matrix()) }
    }
}

impl GkslGenerator {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<GeneratorFile>(s)?.into_generator()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GeneratorFile::from(self)).expect("generator serializes")
    }
}

impl DensityMatrix {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<StateFile>(s)?.into_state()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StateFile::from(self)).expect("state serializes")
    }
}
