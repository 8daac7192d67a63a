//! Single-layer bidirectional LSTM with a softmax output layer and
//! hand-written backpropagation through time.
//!
//! Gate layout inside every `4H` block is `[input, forget, cell, output]`.
//! Each direction sees `[x_t ; h_{t-1}]` and starts from zero state.

use rand::Rng;

use super::ProbeError;
use crate::scalar::{dot, Scalar};

/// One LSTM direction: `weights` is `4H x (D + H)` row-major, `bias` is `4H`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell<T> {
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeParams<T> {
    pub forward: LstmCell<T>,
    pub backward: LstmCell<T>,
    /// `K x 2H` row-major; columns `0..H` read the forward state.
    pub out_weights: Vec<T>,
    pub out_bias: Vec<T>,
}

impl<T: Scalar> ProbeParams<T> {
    pub fn tensors(&self) -> [&[T]; 6] {
        [
            &self.forward.weights,
            &self.forward.bias,
            &self.backward.weights,
            &self.backward.bias,
            &self.out_weights,
            &self.out_bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<T>; 6] {
        [
            &mut self.forward.weights,
            &mut self.forward.bias,
            &mut self.backward.weights,
            &mut self.backward.bias,
            &mut self.out_weights,
            &mut self.out_bias,
        ]
    }

    pub fn zeros_like(&self) -> Self {
        let z = |v: &Vec<T>| vec![T::zero(); v.len()];
        ProbeParams {
            forward: LstmCell {
                weights: z(&self.forward.weights),
                bias: z(&self.forward.bias),
            },
            backward: LstmCell {
                weights: z(&self.backward.weights),
                bias: z(&self.backward.bias),
            },
            out_weights: z(&self.out_weights),
            out_bias: z(&self.out_bias),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }
}

/// Input rows (`len x D`) and gold tag indices; `None` marks tail padding.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceExample<T> {
    pub inputs: Vec<T>,
    pub tags: Vec<Option<usize>>,
}

impl<T> SequenceExample<T> {
    /// Number of leading non-padding positions.
    pub fn len(&self) -> usize {
        self.tags.iter().take_while(|t| t.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeModel<T> {
    pub input_dim: usize,
    pub hidden: usize,
    pub tagset: Vec<String>,
    pub params: ProbeParams<T>,
}

/// Per-step activations of one direction, in processing order.
struct DirectionTrace<T> {
    /// `[i, f, g, o]` activations per step, `4H` each.
    gates: Vec<T>,
    /// cell states per step, `H` each
    cells: Vec<T>,
    /// `tanh(c)` per step
    tanh_cells: Vec<T>,
    /// hidden states per step
    hiddens: Vec<T>,
}

struct ForwardTrace<T> {
    forward: DirectionTrace<T>,
    backward: DirectionTrace<T>,
    /// dropped-out concatenated states, `len x 2H`
    features: Vec<T>,
    /// softmax output, `len x K`
    probs: Vec<T>,
}

#[inline]
fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Inverted-dropout mask of `len x width` entries: `0` with probability
/// `rate`, otherwise `1 / (1 - rate)`.
pub fn sample_dropout_mask<T: Scalar>(len: usize, width: usize, rate: f64, rng: &mut impl Rng) -> Vec<T> {
    let keep = T::of(1.0 / (1.0 - rate));
    (0..len * width)
        .map(|_| if rng.random::<f64>() < rate { T::zero() } else { keep })
        .collect()
}

impl<T: Scalar> ProbeModel<T> {
    /// LSTM weights `~U(-1/√H, 1/√H)`, forget-gate bias 1, other biases 0;
    /// output weights `~U(-1/√(2H), 1/√(2H))`, output bias 0.
    pub fn new(input_dim: usize, hidden: usize, tagset: Vec<String>, rng: &mut impl Rng) -> Self {
        let h = hidden;
        let r = 1.0 / (h as f64).sqrt();
        let cell = |rng: &mut dyn rand::RngCore| {
            let weights = (0..4 * h * (input_dim + h))
                .map(|_| T::of(rng.random_range(-r..r)))
                .collect();
            let bias = (0..4 * h)
                .map(|i| if (h..2 * h).contains(&i) { T::one() } else { T::zero() })
                .collect();
            LstmCell { weights, bias }
        };
        let forward = cell(rng);
        let backward = cell(rng);
        let ro = 1.0 / ((2 * h) as f64).sqrt();
        let out_weights = (0..tagset.len() * 2 * h)
            .map(|_| T::of(rng.random_range(-ro..ro)))
            .collect();
        let out_bias = vec![T::zero(); tagset.len()];
        ProbeModel {
            input_dim,
            hidden,
            tagset,
            params: ProbeParams {
                forward,
                backward,
                out_weights,
                out_bias,
            },
        }
    }

    /// All-zero parameters.
    pub fn zeros(input_dim: usize, hidden: usize, tagset: Vec<String>) -> Self {
        let h = hidden;
        let cell = || LstmCell {
            weights: vec![T::zero(); 4 * h * (input_dim + h)],
            bias: vec![T::zero(); 4 * h],
        };
        ProbeModel {
            input_dim,
            hidden,
            params: ProbeParams {
                forward: cell(),
                backward: cell(),
                out_weights: vec![T::zero(); tagset.len() * 2 * h],
                out_bias: vec![T::zero(); tagset.len()],
            },
            tagset,
        }
    }

    pub fn n_tags(&self) -> usize {
        self.tagset.len()
    }

    /// Row-wise tag distributions for a `len x D` input. A mask (from
    /// [`sample_dropout_mask`], `len x 2H`) switches on training-mode dropout.
    pub fn forward(&self, inputs: &[T], dropout_mask: Option<&[T]>) -> Result<Vec<T>, ProbeError> {
        let len = self.check_inputs(inputs)?;
        if len == 0 {
            return Err(ProbeError::Shape { expected: 1, found: 0 });
        }
        if let Some(mask) = dropout_mask {
            if mask.len() != len * 2 * self.hidden {
                return Err(ProbeError::Shape {
                    expected: len * 2 * self.hidden,
                    found: mask.len(),
                });
            }
        }
        Ok(self.trace(inputs, len, dropout_mask).probs)
    }

    /// Argmax tag index per position, dropout off.
    pub fn predict(&self, inputs: &[T]) -> Result<Vec<usize>, ProbeError> {
        let probs = self.forward(inputs, None)?;
        Ok(probs
            .chunks_exact(self.n_tags())
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold((0, T::neg_infinity()), |best, (i, &p)| if p > best.1 { (i, p) } else { best })
                    .0
            })
            .collect())
    }

    fn check_inputs(&self, inputs: &[T]) -> Result<usize, ProbeError> {
        if self.input_dim == 0 || inputs.len() % self.input_dim != 0 {
            return Err(ProbeError::Shape {
                expected: self.input_dim,
                found: inputs.len(),
            });
        }
        Ok(inputs.len() / self.input_dim)
    }

    fn run_direction(&self, cell: &LstmCell<T>, inputs: &[T], order: &[usize]) -> DirectionTrace<T> {
        let (d, h) = (self.input_dim, self.hidden);
        let width = d + h;
        let steps = order.len();
        let mut trace = DirectionTrace {
            gates: Vec::with_capacity(steps * 4 * h),
            cells: Vec::with_capacity(steps * h),
            tanh_cells: Vec::with_capacity(steps * h),
            hiddens: Vec::with_capacity(steps * h),
        };
        let mut xh = vec![T::zero(); width];
        let mut h_prev = vec![T::zero(); h];
        let mut c_prev = vec![T::zero(); h];
        let mut z = vec![T::zero(); 4 * h];
        for &t in order {
            xh[..d].copy_from_slice(&inputs[t * d..(t + 1) * d]);
            xh[d..].copy_from_slice(&h_prev);
            for (r, zr) in z.iter_mut().enumerate() {
                *zr = dot(&cell.weights[r * width..(r + 1) * width], &xh) + cell.bias[r];
            }
            for k in 0..h {
                let i = sigmoid(z[k]);
                let f = sigmoid(z[h + k]);
                let g = z[2 * h + k].tanh();
                let o = sigmoid(z[3 * h + k]);
                z[k] = i;
                z[h + k] = f;
                z[2 * h + k] = g;
                z[3 * h + k] = o;
                let c = f * c_prev[k] + i * g;
                let tc = c.tanh();
                c_prev[k] = c;
                h_prev[k] = o * tc;
                trace.cells.push(c);
                trace.tanh_cells.push(tc);
            }
            trace.gates.extend_from_slice(&z);
            trace.hiddens.extend_from_slice(&h_prev);
        }
        trace
    }

    fn trace(&self, inputs: &[T], len: usize, mask: Option<&[T]>) -> ForwardTrace<T> {
        let h = self.hidden;
        let k = self.n_tags();
        let fwd_order: Vec<usize> = (0..len).collect();
        let bwd_order: Vec<usize> = (0..len).rev().collect();
        let forward = self.run_direction(&self.params.forward, inputs, &fwd_order);
        let backward = self.run_direction(&self.params.backward, inputs, &bwd_order);

        let mut features = Vec::with_capacity(len * 2 * h);
        for t in 0..len {
            features.extend_from_slice(&forward.hiddens[t * h..(t + 1) * h]);
            // backward direction reached position t at step len-1-t
            let s = len - 1 - t;
            features.extend_from_slice(&backward.hiddens[s * h..(s + 1) * h]);
        }
        if let Some(mask) = mask {
            for (f, &m) in features.iter_mut().zip(mask) {
                *f *= m;
            }
        }

        let mut probs = Vec::with_capacity(len * k);
        for feat in features.chunks_exact(2 * h) {
            let start = probs.len();
            for r in 0..k {
                let w = &self.params.out_weights[r * 2 * h..(r + 1) * 2 * h];
                probs.push(dot(w, feat) + self.params.out_bias[r]);
            }
            softmax_in_place(&mut probs[start..]);
        }
        ForwardTrace {
            forward,
            backward,
            features,
            probs,
        }
    }

    /// Mean token cross-entropy over the batch and its gradient.
    ///
    /// Padding positions contribute nothing. With `dropout_rate > 0` one
    /// mask per sentence is drawn from `rng`, in batch order.
    pub fn loss_and_grads(
        &self,
        batch: &[SequenceExample<T>],
        dropout_rate: f64,
        rng: &mut impl Rng,
    ) -> Result<(T, ProbeParams<T>), ProbeError> {
        let k = self.n_tags();
        let n_tokens: usize = batch.iter().map(SequenceExample::len).sum();
        if n_tokens == 0 {
            return Err(ProbeError::EmptyBatch);
        }
        let scale = T::one() / T::from_usize(n_tokens).expect("token count fits the scalar type");
        let mut grads = self.params.zeros_like();
        let mut loss = T::zero();
        for ex in batch {
            let len = ex.len();
            if len == 0 {
                continue;
            }
            if ex.inputs.len() < len * self.input_dim {
                return Err(ProbeError::Shape {
                    expected: len * self.input_dim,
                    found: ex.inputs.len(),
                });
            }
            if let Some(bad) = ex.tags[..len].iter().flatten().find(|&&t| t >= k) {
                return Err(ProbeError::UnknownTag(bad.to_string()));
            }
            let inputs = &ex.inputs[..len * self.input_dim];
            let mask = (dropout_rate > 0.0).then(|| sample_dropout_mask(len, 2 * self.hidden, dropout_rate, rng));
            let trace = self.trace(inputs, len, mask.as_deref());
            loss += self.backprop(inputs, len, ex, &trace, mask.as_deref(), scale, &mut grads);
        }
        Ok((loss * scale, grads))
    }

    /// Accumulates `scale`-weighted gradients of one sentence into `grads`
    /// and returns its summed (unscaled) loss.
    #[allow(clippy::too_many_arguments)]
    fn backprop(
        &self,
        inputs: &[T],
        len: usize,
        ex: &SequenceExample<T>,
        trace: &ForwardTrace<T>,
        mask: Option<&[T]>,
        scale: T,
        grads: &mut ProbeParams<T>,
    ) -> T {
        let h = self.hidden;
        let k = self.n_tags();
        let mut loss = T::zero();
        let mut d_features = vec![T::zero(); len * 2 * h];
        for t in 0..len {
            let gold = ex.tags[t].expect("within the unpadded prefix");
            let p = &trace.probs[t * k..(t + 1) * k];
            loss -= p[gold].max(T::min_positive_value()).ln();
            let feat = &trace.features[t * 2 * h..(t + 1) * 2 * h];
            let d_feat = &mut d_features[t * 2 * h..(t + 1) * 2 * h];
            for r in 0..k {
                let mut dl = p[r];
                if r == gold {
                    dl -= T::one();
                }
                dl *= scale;
                grads.out_bias[r] += dl;
                let w = &self.params.out_weights[r * 2 * h..(r + 1) * 2 * h];
                let gw = &mut grads.out_weights[r * 2 * h..(r + 1) * 2 * h];
                for j in 0..2 * h {
                    gw[j] += dl * feat[j];
                    d_feat[j] += dl * w[j];
                }
            }
        }
        if let Some(mask) = mask {
            for (d, &m) in d_features.iter_mut().zip(mask) {
                *d *= m;
            }
        }
        // split into per-step upstream gradients, in each direction's order
        let mut d_fwd = vec![T::zero(); len * h];
        let mut d_bwd = vec![T::zero(); len * h];
        for t in 0..len {
            let src = &d_features[t * 2 * h..(t + 1) * 2 * h];
            d_fwd[t * h..(t + 1) * h].copy_from_slice(&src[..h]);
            let s = len - 1 - t;
            d_bwd[s * h..(s + 1) * h].copy_from_slice(&src[h..]);
        }
        let fwd_order: Vec<usize> = (0..len).collect();
        let bwd_order: Vec<usize> = (0..len).rev().collect();
        self.backprop_direction(&self.params.forward, &mut grads.forward, inputs, &fwd_order, &trace.forward, &d_fwd);
        self.backprop_direction(&self.params.backward, &mut grads.backward, inputs, &bwd_order, &trace.backward, &d_bwd);
        loss
    }

    fn backprop_direction(
        &self,
        cell: &LstmCell<T>,
        grad: &mut LstmCell<T>,
        inputs: &[T],
        order: &[usize],
        tr: &DirectionTrace<T>,
        d_hidden: &[T],
    ) {
        let (d, h) = (self.input_dim, self.hidden);
        let width = d + h;
        let one = T::one();
        let mut dh_next = vec![T::zero(); h];
        let mut dc_next = vec![T::zero(); h];
        let mut dz = vec![T::zero(); 4 * h];
        let mut xh = vec![T::zero(); width];
        for s in (0..order.len()).rev() {
            let t = order[s];
            let gates = &tr.gates[s * 4 * h..(s + 1) * 4 * h];
            for j in 0..h {
                let (i, f, g, o) = (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
                let tc = tr.tanh_cells[s * h + j];
                let c_prev = if s == 0 { T::zero() } else { tr.cells[(s - 1) * h + j] };
                let dh = d_hidden[s * h + j] + dh_next[j];
                let d_o = dh * tc;
                let dc = dh * o * (one - tc * tc) + dc_next[j];
                dz[j] = dc * g * i * (one - i);
                dz[h + j] = dc * c_prev * f * (one - f);
                dz[2 * h + j] = dc * i * (one - g * g);
                dz[3 * h + j] = d_o * o * (one - o);
                dc_next[j] = dc * f;
            }
            xh[..d].copy_from_slice(&inputs[t * d..(t + 1) * d]);
            if s == 0 {
                xh[d..].iter_mut().for_each(|x| *x = T::zero());
            } else {
                xh[d..].copy_from_slice(&tr.hiddens[(s - 1) * h..s * h]);
            }
            dh_next.iter_mut().for_each(|x| *x = T::zero());
            for (r, &dzr) in dz.iter().enumerate() {
                grad.bias[r] += dzr;
                let w = &cell.weights[r * width..(r + 1) * width];
                let gw = &mut grad.weights[r * width..(r + 1) * width];
                for c in 0..width {
                    gw[c] += dzr * xh[c];
                }
                for j in 0..h {
                    dh_next[j] += dzr * w[d + j];
                }
            }
        }
    }
}

fn softmax_in_place<T: Scalar>(row: &mut [T]) {
    let max = row.iter().copied().fold(T::neg_infinity(), T::max);
    let mut sum = T::zero();
    for x in row.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    row.iter_mut().for_each(|x| *x /= sum);
}
