use crate::field::Dims;

/// Edge-stopping function `c(s) = k²/(k² + s²)`.
pub fn edge_stopping_c(s: f64, k: f64) -> f64 {
    let k2 = k * k;
    k2 / (k2 + s * s)
}

/// Normalized Gaussian taps for offsets `-r..=r`, `r = ⌈3σ⌉`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.into_iter().map(|w| w / total).collect()
}

/// Separable Gaussian blur of a scalar grid with replicate boundaries.
/// `sigma` is in voxels; `sigma = 0` returns the input unchanged.
pub fn gaussian_smooth(values: &[f64], dims: &Dims, sigma: f64) -> Vec<f64> {
    assert_eq!(values.len(), dims.len(), "scalar grid size mismatch");
    if sigma <= 0.0 {
        return values.to_vec();
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let mut current = values.to_vec();
    for axis in 0..dims.m() {
        current = (0..current.len())
            .map(|i| {
                kernel
                    .iter()
                    .enumerate()
                    .map(|(t, w)| w * current[dims.offset(i, axis, t as isize - radius)])
                    .sum()
            })
            .collect();
    }
    current
}
