//! Versioned JSON model files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::net::{QNetwork, N_ACTIONS};

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported model format version {0}")]
    Version(u32),
    #[error("inconsistent model file: {0}")]
    BadShape(String),
}

/// Provenance carried alongside the weights; checked against the deployment
/// configuration before a model is used.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelMeta {
    pub obs_dim: usize,
    pub obs_layout: Vec<String>,
    pub split_mode: bool,
    pub barrier: String,
    pub max_cells: usize,
    pub cost_weight: f64,
    pub config_hash: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    dims: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    meta: ModelMeta,
}

pub fn save_model(net: &QNetwork, meta: &ModelMeta, path: &Path) -> Result<(), FormatError> {
    let file = ModelFile {
        version: MODEL_FORMAT_VERSION,
        dims: net.dims().to_vec(),
        weights: net.weights().to_vec(),
        biases: net.biases().to_vec(),
        meta: meta.clone(),
    };
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(QNetwork, ModelMeta), FormatError> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text)?;
    if file.version != MODEL_FORMAT_VERSION {
        return Err(FormatError::Version(file.version));
    }
    if file.dims.len() < 2 {
        return Err(FormatError::BadShape("fewer than two layer dims".into()));
    }
    if *file.dims.last().unwrap() != N_ACTIONS {
        return Err(FormatError::BadShape(format!(
            "output dimension {} != {N_ACTIONS}",
            file.dims.last().unwrap()
        )));
    }
    let n_layers = file.dims.len() - 1;
    if file.weights.len() != n_layers || file.biases.len() != n_layers {
        return Err(FormatError::BadShape("layer count mismatch".into()));
    }
    for l in 0..n_layers {
        let (n_in, n_out) = (file.dims[l], file.dims[l + 1]);
        if file.weights[l].len() != n_in * n_out {
            return Err(FormatError::BadShape(format!("weight matrix {l} has wrong size")));
        }
        if file.biases[l].len() != n_out {
            return Err(FormatError::BadShape(format!("bias vector {l} has wrong size")));
        }
    }
    if file.meta.obs_dim != file.dims[0] {
        return Err(FormatError::BadShape(format!(
            "metadata obs_dim {} does not match input layer {}",
            file.meta.obs_dim, file.dims[0]
        )));
    }
    let net = QNetwork::from_parts(file.dims, file.weights, file.biases);
    Ok((net, file.meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn meta(obs_dim: usize) -> ModelMeta {
        ModelMeta {
            obs_dim,
            obs_layout: vec!["a".into(); obs_dim],
            split_mode: false,
            barrier: "sqrt".into(),
            max_cells: 25,
            cost_weight: 25.0,
            config_hash: "deadbeef".into(),
        }
    }

    #[test]
    fn round_trip_preserves_forward_outputs_bitwise() {
        let dir = std::env::temp_dir().join("amrbench-model-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("model.json");
        let net = QNetwork::new(5, 99);
        save_model(&net, &meta(5), &path).unwrap();
        let (back, m) = load_model(&path).unwrap();
        assert_eq!(m, meta(5));
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let obs: Vec<f64> = (0..5).map(|_| rng.random_range(-20.0..2.0)).collect();
            let a = net.forward(&obs).unwrap();
            let b = back.forward(&obs).unwrap();
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn truncated_file_is_rejected() {
        let dir = std::env::temp_dir().join("amrbench-model-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("truncated.json");
        let net = QNetwork::new(5, 1);
        save_model(&net, &meta(5), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_model(&path), Err(FormatError::Parse(_))));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn inconsistent_obs_dim_is_rejected() {
        let dir = std::env::temp_dir().join("amrbench-model-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("badmeta.json");
        let net = QNetwork::new(5, 1);
        let mut m = meta(5);
        m.obs_dim = 7;
        save_model(&net, &m, &path).unwrap();
        assert!(matches!(load_model(&path), Err(FormatError::BadShape(_))));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn wrong_version_is_rejected() {
        let dir = std::env::temp_dir().join("amrbench-model-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("version.json");
        let net = QNetwork::new(5, 1);
        save_model(&net, &meta(5), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace("\"version\": 1", "\"version\": 999")).unwrap();
        assert!(matches!(load_model(&path), Err(FormatError::Version(999))));
        std::fs::remove_file(&path).unwrap();
    }
}
