use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{expand_single_arx, DeePCData, SingleArxPredictor, TransientPredictor};
use crate::signals::HankelConfig;
use crate::{DpcError, Mat, Result, Vector};

pub const PREDICTOR_FORMAT_VERSION: u32 = 1;

/// Dense matrix stored as dimensions plus row-major values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl MatrixDump {
    pub fn from_mat(m: &Mat) -> Self {
        let data = m
            .row_iter()
            .flat_map(|r| r.iter().copied().collect::<Vec<_>>())
            .collect();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_mat(&self) -> Result<Mat> {
        if self.data.len() != self.rows * self.cols {
            return Err(DpcError::dim(
                "matrix dump length",
                self.rows * self.cols,
                self.data.len(),
            ));
        }
        Ok(Mat::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TpcDump {
    config: HankelConfig,
    outputs: usize,
    inputs: usize,
    phi: MatrixDump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ArxDump {
    config: HankelConfig,
    outputs: usize,
    inputs: usize,
    phi: MatrixDump,
    residual_std: Vec<f64>,
    warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DeePCDump {
    config: HankelConfig,
    outputs: usize,
    inputs: usize,
    u_p: MatrixDump,
    y_p: MatrixDump,
    u_f: MatrixDump,
    y_f: MatrixDump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BundleFile {
    format_version: u32,
    tpc: Option<TpcDump>,
    arx: Option<ArxDump>,
    deepc: Option<DeePCDump>,
}

/// Fitted predictors written by `fit` and read back by `run`.
///
/// Only the identified coefficients are stored; derived multi-step matrices
/// are rebuilt on load with the same deterministic recursion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictorBundle {
    pub tpc: Option<TransientPredictor>,
    pub arx: Option<SingleArxPredictor>,
    pub deepc: Option<DeePCData>,
}

impl PredictorBundle {
    pub fn to_json(&self) -> Result<String> {
        let file = BundleFile {
            format_version: PREDICTOR_FORMAT_VERSION,
            tpc: self.tpc.as_ref().map(|t| TpcDump {
                config: t.config,
                outputs: t.outputs,
                inputs: t.inputs,
                phi: MatrixDump::from_mat(&t.phi),
            }),
            arx: self.arx.as_ref().map(|a| ArxDump {
                config: a.config,
                outputs: a.outputs,
                inputs: a.inputs,
                phi: MatrixDump::from_mat(&a.phi),
                residual_std: a.residual_std.iter().copied().collect(),
                warnings: a.warnings.clone(),
            }),
            deepc: self.deepc.as_ref().map(|d| DeePCDump {
                config: d.config,
                outputs: d.outputs,
                inputs: d.inputs,
                u_p: MatrixDump::from_mat(&d.u_p),
                y_p: MatrixDump::from_mat(&d.y_p),
                u_f: MatrixDump::from_mat(&d.u_f),
                y_f: MatrixDump::from_mat(&d.y_f),
            }),
        };
        serde_json::to_string(&file).map_err(|e| DpcError::Contract(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BundleFile = serde_json::from_str(text).map_err(|e| DpcError::parse("<predictor bundle>", e))?;
        if file.format_version != PREDICTOR_FORMAT_VERSION {
            return Err(DpcError::parse(
                "<predictor bundle>",
                format!(
                    "format version {} is not supported (expected {PREDICTOR_FORMAT_VERSION})",
                    file.format_version
                ),
            ));
        }
        let tpc = match file.tpc {
            Some(t) => Some(TransientPredictor::from_phi(
                t.phi.to_mat()?,
                t.config,
                t.outputs,
                t.inputs,
            )?),
            None => None,
        };
        let arx = match file.arx {
            Some(a) => {
                let phi = a.phi.to_mat()?;
                let (h_p, h_u) = expand_single_arx(&phi, a.outputs, a.inputs, a.config)?;
                Some(SingleArxPredictor {
                    phi,
                    residual_std: Vector::from_vec(a.residual_std),
                    h_p,
                    h_u,
                    config: a.config,
                    outputs: a.outputs,
                    inputs: a.inputs,
                    warnings: a.warnings,
                })
            }
            None => None,
        };
        let deepc = match file.deepc {
            Some(d) => Some(DeePCData {
                u_p: d.u_p.to_mat()?,
                y_p: d.y_p.to_mat()?,
                u_f: d.u_f.to_mat()?,
                y_f: d.y_f.to_mat()?,
                config: d.config,
                outputs: d.outputs,
                inputs: d.inputs,
            }),
            None => None,
        };
        Ok(Self { tpc, arx, deepc })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| DpcError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| DpcError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            DpcError::Parse { message, .. } => DpcError::parse(path, message),
            other => other,
        })
    }
}
