use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::io::fmt_f64;
use crate::param::ParameterVector;

/// Kept samples of one chain plus the bookkeeping needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub algorithm: String,
    pub names: Vec<String>,
    #[serde(skip)]
    pub samples: Vec<ParameterVector>,
    pub acceptance_rate: f64,
    pub seed: u64,
    pub stream: u64,
    pub config: serde_json::Value,
    pub wall_time_secs: f64,
}

impl ChainTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples of parameter `i`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s[i]).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        (0..self.names.len())
            .map(|i| self.samples.iter().map(|s| s[i]).sum::<f64>() / self.samples.len().max(1) as f64)
            .collect()
    }

    /// One row per kept sample, one column per parameter.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.names.join(","))?;
        for s in &self.samples {
            let row: Vec<String> = s.values().iter().map(|v| fmt_f64(*v)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// JSON sidecar: everything except the samples.
    pub fn sidecar_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rebuilds a trace from its CSV body and JSON sidecar.
    pub fn read<R: Read, J: Read>(csv_body: R, sidecar: J) -> Result<ChainTrace> {
        let mut trace: ChainTrace = serde_json::from_reader(sidecar)?;
        let mut rdr = csv::Reader::from_reader(csv_body);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header != trace.names {
            return invalid(format!("trace columns {header:?} do not match sidecar names {:?}", trace.names));
        }
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| crate::Error::InvalidArgument(format!("bad trace value {f:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            trace.samples.push(ParameterVector::new(row));
        }
        Ok(trace)
    }
}
