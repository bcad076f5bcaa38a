use super::rules::gauss_hermite;
use super::IntegralEstimate;
use crate::error::{Error, Result};
use crate::C64;

pub const MAX_TENSOR_DIM: usize = 4;
pub const MAX_TENSOR_ORDER: usize = 64;

/// Weight of the tensor rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianWeight {
    /// exp(-|p|^2)
    Hermite,
    /// exp(-|p|^2 / 2), handled by rescaling p = sqrt(2) x.
    Normal,
}

/// Tensor-product Gauss-Hermite approximation of ∫ f(p) w(p) dp over R^dim.
pub fn gauss_hermite_tensor<F>(f: F, dim: usize, order: usize, weight: GaussianWeight) -> Result<IntegralEstimate>
where
    F: Fn(&[f64]) -> C64,
{
    if dim == 0 || dim > MAX_TENSOR_DIM {
        return Err(Error::Dimension(format!(
            "tensor dimension {dim} not in 1..={MAX_TENSOR_DIM}"
        )));
    }
    if order == 0 || order > MAX_TENSOR_ORDER {
        return Err(Error::Dimension(format!(
            "tensor order {order} not in 1..={MAX_TENSOR_ORDER}"
        )));
    }
    let rule = gauss_hermite(order);
    let (scale, wscale) = match weight {
        GaussianWeight::Hermite => (1.0, 1.0),
        GaussianWeight::Normal => (std::f64::consts::SQRT_2, std::f64::consts::SQRT_2),
    };
    let nodes: Vec<f64> = rule.nodes.iter().map(|x| x * scale).collect();
    let weights: Vec<f64> = rule.weights.iter().map(|w| w * wscale).collect();

    let total = order.pow(dim as u32);
    let mut idx = vec![0usize; dim];
    let mut p = vec![0.0; dim];
    let mut acc = C64::new(0.0, 0.0);
    for _ in 0..total {
        let mut w = 1.0;
        for d in 0..dim {
            p[d] = nodes[idx[d]];
            w *= weights[idx[d]];
        }
        acc += f(&p) * w;
        for d in (0..dim).rev() {
            idx[d] += 1;
            if idx[d] < order {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(IntegralEstimate::exact(acc, total as u64))
}
