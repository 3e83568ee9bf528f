//! Dense-layer weight checkpoints and the normalized checkpoint distance.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckpointError {
    #[error("architecture must have at least one layer")]
    EmptyArchitecture,
    #[error("layer {layer}: dimensions must be >= 1 and bias_len must equal rows (got {rows}x{cols}, bias {bias_len})")]
    BadLayerShape {
        layer: usize,
        rows: usize,
        cols: usize,
        bias_len: usize,
    },
    #[error("checkpoint does not match architecture: {0}")]
    ShapeMismatch(String),
    #[error("non-finite parameter in layer {layer}")]
    NonFinite { layer: usize },
    #[error("sequence needs at least two checkpoints, got {0}")]
    TooShort(usize),
    #[error("checkpoint at position {position} has epoch {epoch}")]
    EpochGap { position: usize, epoch: usize },
}

/// Shape of one dense layer: `rows` outputs, `cols` inputs, one bias per output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayerShape {
    pub rows: usize,
    pub cols: usize,
    pub bias_len: usize,
}

impl LayerShape {
    pub fn dense(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bias_len: rows,
        }
    }

    pub fn param_count(&self) -> usize {
        self.rows * self.cols + self.bias_len
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Architecture {
    layers: Vec<LayerShape>,
}

impl Architecture {
    pub fn new(layers: Vec<LayerShape>) -> Result<Self, CheckpointError> {
        if layers.is_empty() {
            return Err(CheckpointError::EmptyArchitecture);
        }
        for (i, l) in layers.iter().enumerate() {
            if l.rows == 0 || l.cols == 0 || l.bias_len != l.rows {
                return Err(CheckpointError::BadLayerShape {
                    layer: i,
                    rows: l.rows,
                    cols: l.cols,
                    bias_len: l.bias_len,
                });
            }
        }
        Ok(Self { layers })
    }

    /// Fully connected network with the given layer widths, input first.
    /// `mlp(&[4, 16, 2])` is a 4→16→2 network with two dense layers.
    pub fn mlp(widths: &[usize]) -> Result<Self, CheckpointError> {
        if widths.len() < 2 {
            return Err(CheckpointError::EmptyArchitecture);
        }
        Self::new(
            widths
                .windows(2)
                .map(|w| LayerShape::dense(w[1], w[0]))
                .collect(),
        )
    }

    pub fn layers(&self) -> &[LayerShape] {
        &self.layers
    }

    pub fn total_params(&self) -> usize {
        self.layers.iter().map(LayerShape::param_count).sum()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].rows
    }
}

/// Parameters of one dense layer. `weights` is row-major `rows × cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn zeros(shape: LayerShape) -> Self {
        Self {
            rows: shape.rows,
            cols: shape.cols,
            weights: vec![0.0; shape.rows * shape.cols],
            bias: vec![0.0; shape.bias_len],
        }
    }

    pub fn shape(&self) -> LayerShape {
        LayerShape {
            rows: self.rows,
            cols: self.cols,
            bias_len: self.bias.len(),
        }
    }

    pub fn weight(&self, r: usize, c: usize) -> f64 {
        self.weights[r * self.cols + c]
    }

    pub fn mean_bias(&self) -> f64 {
        self.bias.iter().sum::<f64>() / self.bias.len() as f64
    }

    /// Squared Euclidean norm of the flattened weight matrix.
    pub fn weight_norm_sq(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    fn diff_norm_sq(&self, other: &Layer) -> f64 {
        let w: f64 = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let b: f64 = self
            .bias
            .iter()
            .zip(&other.bias)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        w + b
    }
}

/// Full parameter snapshot after epoch `epoch` (epoch 0 is the initialization).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightCheckpoint {
    pub epoch: usize,
    pub layers: Vec<Layer>,
}

impl WeightCheckpoint {
    pub fn new(epoch: usize, layers: Vec<Layer>) -> Result<Self, CheckpointError> {
        for (i, l) in layers.iter().enumerate() {
            if l.weights.len() != l.rows * l.cols {
                return Err(CheckpointError::ShapeMismatch(format!(
                    "layer {i} has {} weights for a {}x{} matrix",
                    l.weights.len(),
                    l.rows,
                    l.cols
                )));
            }
            if l.weights.iter().chain(&l.bias).any(|x| !x.is_finite()) {
                return Err(CheckpointError::NonFinite { layer: i });
            }
        }
        Ok(Self { epoch, layers })
    }

    pub fn zeros(arch: &Architecture, epoch: usize) -> Self {
        Self {
            epoch,
            layers: arch.layers().iter().copied().map(Layer::zeros).collect(),
        }
    }

    /// Rebuilds a checkpoint from the canonical flat ordering of [`flatten`](Self::flatten).
    pub fn from_flat(
        arch: &Architecture,
        epoch: usize,
        flat: &[f64],
    ) -> Result<Self, CheckpointError> {
        if flat.len() != arch.total_params() {
            return Err(CheckpointError::ShapeMismatch(format!(
                "expected {} parameters, got {}",
                arch.total_params(),
                flat.len()
            )));
        }
        let mut off = 0;
        let mut layers = Vec::with_capacity(arch.layers().len());
        for s in arch.layers() {
            let nw = s.rows * s.cols;
            let weights = flat[off..off + nw].to_vec();
            off += nw;
            let bias = flat[off..off + s.bias_len].to_vec();
            off += s.bias_len;
            layers.push(Layer {
                rows: s.rows,
                cols: s.cols,
                weights,
                bias,
            });
        }
        Self::new(epoch, layers)
    }

    pub fn total_w(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn matches(&self, arch: &Architecture) -> bool {
        self.layers.len() == arch.layers().len()
            && self
                .layers
                .iter()
                .zip(arch.layers())
                .all(|(l, s)| l.shape() == *s && l.weights.len() == s.rows * s.cols)
    }

    fn same_shape(&self, other: &WeightCheckpoint) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.shape() == b.shape())
    }

    /// Layer-major, row-major, weights-then-bias concatenation.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_w());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }
}

/// Normalized distance between two checkpoints: the Frobenius norm of the
/// difference over all layers (biases included) divided by the total
/// parameter count.
pub fn dl_distance(a: &WeightCheckpoint, b: &WeightCheckpoint) -> Result<f64, CheckpointError> {
    if !a.same_shape(b) {
        return Err(CheckpointError::ShapeMismatch(
            "checkpoints have different layer shapes".into(),
        ));
    }
    let sum: f64 = a
        .layers
        .iter()
        .zip(&b.layers)
        .map(|(x, y)| x.diff_norm_sq(y))
        .sum();
    Ok(sum.sqrt() / a.total_w() as f64)
}

/// `W_0, …, W_P` for one architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSequence {
    arch: Architecture,
    checkpoints: Vec<WeightCheckpoint>,
}

impl CheckpointSequence {
    pub fn new(
        arch: Architecture,
        checkpoints: Vec<WeightCheckpoint>,
    ) -> Result<Self, CheckpointError> {
        if checkpoints.len() < 2 {
            return Err(CheckpointError::TooShort(checkpoints.len()));
        }
        for (i, c) in checkpoints.iter().enumerate() {
            if c.epoch != i {
                return Err(CheckpointError::EpochGap {
                    position: i,
                    epoch: c.epoch,
                });
            }
            if !c.matches(&arch) {
                return Err(CheckpointError::ShapeMismatch(format!(
                    "checkpoint {i} does not match the sequence architecture"
                )));
            }
        }
        Ok(Self { arch, checkpoints })
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn checkpoints(&self) -> &[WeightCheckpoint] {
        &self.checkpoints
    }

    /// Number of training epochs `P` (one less than the checkpoint count).
    pub fn epochs(&self) -> usize {
        self.checkpoints.len() - 1
    }

    pub fn initial(&self) -> &WeightCheckpoint {
        &self.checkpoints[0]
    }

    pub fn last(&self) -> &WeightCheckpoint {
        &self.checkpoints[self.checkpoints.len() - 1]
    }

    /// The first `len` checkpoints as a sequence of their own.
    pub fn prefix(&self, len: usize) -> Result<Self, CheckpointError> {
        Self::new(
            self.arch.clone(),
            self.checkpoints[..len.min(self.checkpoints.len())].to_vec(),
        )
    }

    pub fn into_parts(self) -> (Architecture, Vec<WeightCheckpoint>) {
        (self.arch, self.checkpoints)
    }
}
