//! JSON state files: `{"dims": [d_A, d_B], "matrix": [[[re, im], ...], ...]}`, row-major.

use std::path::Path;

use entrosteer::qmat::{CMatrix, DensityMatrix};
use entrosteer::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let (da, db) = rho.dims();
        let m = rho.matrix();
        Self {
            dims: [da, db],
            matrix: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        let n = self.matrix.len();
        if self.matrix.iter().any(|row| row.len() != n) {
            return Err(CliError::Config("state matrix is not square".into()));
        }
        let m = CMatrix::from_fn(n, n, |r, c| {
            let [re, im] = self.matrix[r][c];
            Complex64::new(re, im)
        });
        DensityMatrix::new((self.dims[0], self.dims[1]), m)
            .map_err(|e| CliError::Config(format!("invalid state file: {e}")))
    }

    pub fn load(path: &Path) -> Result<DensityMatrix, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: StateFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))?;
        file.to_density()
    }
}
