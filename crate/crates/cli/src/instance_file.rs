//! JSON instance and quantizer files.
//!
//! Matrices are nested arrays of `[re, im]` pairs, row-major: `H[ℓ][k][row][col]`,
//! `Sigma[ℓ][row][col]`, `Kx[k][row][col]`. Shape errors name the offending
//! index, e.g. `H[1][0][2]: expected 2 columns, found 3`.

use std::path::Path;

use cran_core::linalg::{self, CMat};
use cran_core::{NetworkInstance, QuantizerB};
use serde::{Deserialize, Serialize};

pub type Pair = [f64; 2];
pub type MatrixJson = Vec<Vec<Pair>>;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Model(#[from] cran_core::ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct InstanceFile {
    pub K: usize,
    pub L: usize,
    pub M: usize,
    pub N: usize,
    pub H: Vec<Vec<MatrixJson>>,
    pub Sigma: Vec<MatrixJson>,
    pub Kx: Vec<MatrixJson>,
    pub P: Vec<f64>,
    pub C: Vec<f64>,
}

/// `{"B": [...]}` or `{"Q": [...]}`, one `N×N` matrix per base station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct QuantizerFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub B: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub Q: Option<Vec<MatrixJson>>,
}

fn read(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Io { path: path.display().to_string(), source })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FileError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|source| FileError::Json { path: path.display().to_string(), source })
}

fn count<T>(field: &str, items: &[T], expected: usize, what: &str) -> Result<(), FileError> {
    if items.len() == expected {
        Ok(())
    } else {
        Err(FileError::Shape(format!("{field}: expected {expected} {what}, found {}", items.len())))
    }
}

/// Checks shape and converts; `at` is the index prefix such as `H[1][0]`.
pub fn to_matrix(at: &str, m: &MatrixJson, rows: usize, cols: usize) -> Result<CMat, FileError> {
    count(at, m, rows, "rows")?;
    let mut flat = Vec::with_capacity(rows * cols);
    for (r, row) in m.iter().enumerate() {
        count(&format!("{at}[{r}]"), row, cols, "columns")?;
        flat.extend_from_slice(row);
    }
    Ok(linalg::from_pairs(rows, cols, &flat))
}

pub fn from_matrix(m: &CMat) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl InstanceFile {
    pub fn load(path: &Path) -> Result<NetworkInstance, FileError> {
        parse::<InstanceFile>(path)?.to_instance()
    }

    pub fn to_instance(&self) -> Result<NetworkInstance, FileError> {
        let (k, l, m, n) = (self.K, self.L, self.M, self.N);
        count("H", &self.H, l, "base stations")?;
        let mut channel = Vec::with_capacity(l);
        for (li, row) in self.H.iter().enumerate() {
            count(&format!("H[{li}]"), row, k, "users")?;
            channel.push(row.iter().enumerate().map(|(ki, h)| to_matrix(&format!("H[{li}][{ki}]"), h, n, m)).collect::<Result<Vec<_>, _>>()?);
        }
        count("Sigma", &self.Sigma, l, "base stations")?;
        let noise = self.Sigma.iter().enumerate().map(|(i, s)| to_matrix(&format!("Sigma[{i}]"), s, n, n)).collect::<Result<Vec<_>, _>>()?;
        count("Kx", &self.Kx, k, "users")?;
        let input = self.Kx.iter().enumerate().map(|(i, s)| to_matrix(&format!("Kx[{i}]"), s, m, m)).collect::<Result<Vec<_>, _>>()?;
        count("P", &self.P, k, "users")?;
        count("C", &self.C, l, "base stations")?;
        Ok(NetworkInstance::new(k, l, m, n, channel, noise, input, self.P.clone(), self.C.clone())?)
    }

    pub fn from_instance(inst: &NetworkInstance) -> Self {
        let (k, l) = (inst.users(), inst.bss());
        Self {
            K: k,
            L: l,
            M: inst.tx_antennas(),
            N: inst.rx_antennas(),
            H: (0..l).map(|li| (0..k).map(|ki| from_matrix(inst.channel(li, ki))).collect()).collect(),
            Sigma: (0..l).map(|li| from_matrix(inst.noise(li))).collect(),
            Kx: (0..k).map(|ki| from_matrix(inst.input(ki))).collect(),
            P: (0..k).map(|ki| inst.power(ki)).collect(),
            C: inst.fronthauls().to_vec(),
        }
    }
}

impl QuantizerFile {
    pub fn load(path: &Path, inst: &NetworkInstance) -> Result<QuantizerB, FileError> {
        parse::<QuantizerFile>(path)?.to_quantizer(inst)
    }

    pub fn to_quantizer(&self, inst: &NetworkInstance) -> Result<QuantizerB, FileError> {
        let n = inst.rx_antennas();
        let mats = |field: &str, list: &[MatrixJson]| -> Result<Vec<CMat>, FileError> {
            count(field, list, inst.bss(), "base stations")?;
            list.iter().enumerate().map(|(i, m)| to_matrix(&format!("{field}[{i}]"), m, n, n)).collect()
        };
        match (&self.B, &self.Q) {
            (Some(b), None) => Ok(QuantizerB::new(inst, mats("B", b)?)?),
            (None, Some(q)) => Ok(QuantizerB::from_noise(inst, &mats("Q", q)?)?),
            _ => Err(FileError::Shape("quantizer file needs exactly one of \"B\" or \"Q\"".into())),
        }
    }

    pub fn from_quantizer(b: &QuantizerB) -> Self {
        Self { B: Some(b.matrices().iter().map(from_matrix).collect()), Q: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let inst = cran_core::random_instance(5, 2, 3, 2, 1, 10.0);
        let file = InstanceFile::from_instance(&inst);
        let back = file.to_instance().unwrap();
        assert_eq!(InstanceFile::from_instance(&back), file);
    }

    #[test]
    fn shape_errors_carry_indices() {
        let mut file = InstanceFile::from_instance(&cran_core::random_instance(5, 2, 2, 2, 2, 10.0));
        file.H[1][0][1].push([0.0, 0.0]);
        let msg = file.to_instance().unwrap_err().to_string();
        assert_eq!(msg, "H[1][0][1]: expected 2 columns, found 3");
        let mut file = InstanceFile::from_instance(&cran_core::random_instance(5, 2, 2, 2, 2, 10.0));
        file.C.pop();
        assert_eq!(file.to_instance().unwrap_err().to_string(), "C: expected 2 base stations, found 1");
    }

    #[test]
    fn quantizer_needs_one_field() {
        let inst = NetworkInstance::scalar(1.0, 1.0, 1.0, 2.0);
        let empty = QuantizerFile { B: None, Q: None };
        assert!(empty.to_quantizer(&inst).is_err());
        let q = QuantizerFile { B: None, Q: Some(vec![vec![vec![[1.0, 0.0]]]]) };
        let b = q.to_quantizer(&inst).unwrap();
        assert!((b.b(0)[(0, 0)].re - 0.5).abs() < 1e-12);
    }
}
