use alloc::vec;
use alloc::vec::Vec;

use super::gemm::{gemm, Layout};
use crate::error::{check_len, Error, Result};
use crate::numerics::SeededRng;

/// Activation applied to the last layer. Hidden layers are always ReLU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputActivation {
    Linear,
    Tanh,
}

/// Fully-connected network with ReLU hidden layers.
///
/// All weights and biases live in one flat buffer. Layer `i` maps
/// `sizes[i] → sizes[i + 1]` and occupies `sizes[i + 1] × sizes[i]` weights
/// (row-major, one row per output unit) followed by `sizes[i + 1]` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    output: OutputActivation,
    params: Vec<f64>,
}

/// Gradients of `Σ_rows ⟨upstream, output⟩` w.r.t. parameters and input.
///
/// `params` is empty when parameter gradients were not requested.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBundle {
    pub params: Vec<f64>,
    pub input: Vec<f64>,
}

/// Activations recorded by a batched forward pass, consumed by `backward_batch`.
#[derive(Debug, Clone)]
pub struct Trace {
    batch: usize,
    // acts[0] is the input; acts[i + 1] the post-activation output of layer i
    acts: Vec<Vec<f64>>,
}

impl Trace {
    pub fn batch(&self) -> usize {
        self.batch
    }

    /// Network output, `batch × out` row-major.
    pub fn output(&self) -> &[f64] {
        self.acts.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn into_output(mut self) -> Vec<f64> {
        self.acts.pop().unwrap_or_default()
    }
}

/// Xavier/Glorot uniform weights for a `fan_out × fan_in` layer.
pub fn xavier_init(fan_in: usize, fan_out: usize, rng: &mut SeededRng) -> Result<Vec<f64>> {
    if fan_in == 0 || fan_out == 0 {
        return Err(Error::Domain(alloc::format!(
            "layer dimensions must be positive, got {fan_in}x{fan_out}"
        )));
    }
    let bound = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
    Ok((0..fan_in * fan_out)
        .map(|_| rng.uniform_range(-bound, bound))
        .collect())
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
}

impl Mlp {
    /// Xavier-uniform weights, zero biases.
    pub fn new(sizes: &[usize], output: OutputActivation, rng: &mut SeededRng) -> Result<Self> {
        let mut net = Self::zeros(sizes, output)?;
        let mut offset = 0;
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = xavier_init(fan_in, fan_out, rng)?;
            net.params[offset..offset + weights.len()].copy_from_slice(&weights);
            offset += fan_in * fan_out + fan_out;
        }
        Ok(net)
    }

    /// Sets every bias to `value`.
    pub fn fill_biases(&mut self, value: f64) {
        let layers: Vec<_> = self.layers().collect();
        for (offset, fan_in, fan_out) in layers {
            let start = offset + fan_in * fan_out;
            self.params[start..start + fan_out].fill(value);
        }
    }

    pub fn zeros(sizes: &[usize], output: OutputActivation) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Domain(alloc::format!(
                "need at least two positive layer sizes, got {sizes:?}"
            )));
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            output,
            params: vec![0.0; param_count(sizes)],
        })
    }

    /// Rebuilds a network from a flat parameter buffer.
    pub fn from_params(sizes: &[usize], output: OutputActivation, params: Vec<f64>) -> Result<Self> {
        let mut net = Self::zeros(sizes, output)?;
        check_len("Mlp::from_params", net.params.len(), params.len())?;
        net.params = params;
        Ok(net)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_size(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_size(&self) -> usize {
        self.sizes[self.sizes.len() - 1]
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn same_architecture(&self, other: &Self) -> bool {
        self.sizes == other.sizes && self.output == other.output
    }

    fn layers(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        // (offset, fan_in, fan_out)
        self.sizes.windows(2).scan(0usize, |offset, w| {
            let here = *offset;
            *offset += w[1] * w[0] + w[1];
            Some((here, w[0], w[1]))
        })
    }

    /// Single-input evaluation.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_batch(x, 1)?.into_output())
    }

    /// Evaluates `batch` row-major inputs at once.
    pub fn forward_batch(&self, x: &[f64], batch: usize) -> Result<Trace> {
        check_len("Mlp::forward input", batch * self.input_size(), x.len())?;
        let n_layers = self.sizes.len() - 1;
        let mut acts = Vec::with_capacity(n_layers + 1);
        acts.push(x.to_vec());
        for (idx, (offset, fan_in, fan_out)) in self.layers().enumerate() {
            let w = &self.params[offset..offset + fan_in * fan_out];
            let b = &self.params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
            let mut z = Vec::with_capacity(batch * fan_out);
            for _ in 0..batch {
                z.extend_from_slice(b);
            }
            let input = &acts[idx];
            gemm(
                input,
                Layout::row_major(batch, fan_in),
                w,
                Layout::transposed(fan_in, fan_out),
                1.0,
                &mut z,
                Layout::row_major(batch, fan_out),
            );
            if idx + 1 < n_layers {
                for v in &mut z {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            } else if self.output == OutputActivation::Tanh {
                for v in &mut z {
                    *v = libm::tanh(*v);
                }
            }
            acts.push(z);
        }
        Ok(Trace { batch, acts })
    }

    /// Reverse-mode gradients for a single input.
    pub fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<GradientBundle> {
        let trace = self.forward_batch(x, 1)?;
        self.backward_batch(&trace, upstream, true)
    }

    /// Gradients of `Σ_rows ⟨upstream_row, output_row⟩`.
    ///
    /// Parameter gradients are summed over the batch; the input gradient is
    /// per row. Set `with_params = false` when only the input gradient is
    /// needed (chaining through a frozen critic).
    pub fn backward_batch(&self, trace: &Trace, upstream: &[f64], with_params: bool) -> Result<GradientBundle> {
        self.backward_impl(trace, upstream, with_params, true)
    }

    /// Parameter gradients only; the returned bundle's `input` is empty.
    pub fn param_gradient_batch(&self, trace: &Trace, upstream: &[f64]) -> Result<GradientBundle> {
        self.backward_impl(trace, upstream, true, false)
    }

    fn backward_impl(
        &self,
        trace: &Trace,
        upstream: &[f64],
        with_params: bool,
        with_input: bool,
    ) -> Result<GradientBundle> {
        let batch = trace.batch;
        check_len("Mlp::backward upstream", batch * self.output_size(), upstream.len())?;
        check_len("Mlp::backward trace depth", self.sizes.len(), trace.acts.len())?;
        let mut grads = if with_params {
            vec![0.0; self.params.len()]
        } else {
            Vec::new()
        };
        let layers: Vec<_> = self.layers().collect();
        let n_layers = layers.len();

        let mut delta = upstream.to_vec();
        if self.output == OutputActivation::Tanh {
            for (d, y) in delta.iter_mut().zip(&trace.acts[n_layers]) {
                *d *= 1.0 - y * y;
            }
        }
        for (idx, &(offset, fan_in, fan_out)) in layers.iter().enumerate().rev() {
            let input = &trace.acts[idx];
            if with_params {
                let (gw, gb) = grads[offset..offset + fan_in * fan_out + fan_out].split_at_mut(fan_in * fan_out);
                // dW = δᵀ · X
                gemm(
                    &delta,
                    Layout::transposed(fan_out, batch),
                    input,
                    Layout::row_major(batch, fan_in),
                    0.0,
                    gw,
                    Layout::row_major(fan_out, fan_in),
                );
                for row in delta.chunks_exact(fan_out) {
                    for (g, d) in gb.iter_mut().zip(row) {
                        *g += d;
                    }
                }
            }
            if idx == 0 && !with_input {
                delta = Vec::new();
                break;
            }
            // dX = δ · W
            let w = &self.params[offset..offset + fan_in * fan_out];
            let mut prev = vec![0.0; batch * fan_in];
            gemm(
                &delta,
                Layout::row_major(batch, fan_out),
                w,
                Layout::row_major(fan_out, fan_in),
                0.0,
                &mut prev,
                Layout::row_major(batch, fan_in),
            );
            if idx > 0 {
                for (p, a) in prev.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
            }
            delta = prev;
        }
        Ok(GradientBundle {
            params: grads,
            input: delta,
        })
    }
}
