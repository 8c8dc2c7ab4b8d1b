//! Least-squares monotone (non-decreasing) regression by pool-adjacent-violators.

/// Non-decreasing least-squares fit with unit weights.
pub fn monotone_regression(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    fit_in_place(&mut out, None);
    out
}

/// Non-decreasing fit minimizing `Σ w_i (y_i − f_i)²`. Weights must be positive.
pub fn monotone_regression_weighted(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    let mut out = values.to_vec();
    fit_in_place(&mut out, Some(weights));
    out
}

struct Block {
    mean: f64,
    weight: f64,
    len: usize,
}

pub(crate) fn fit_in_place(values: &mut [f64], weights: Option<&[f64]>) {
    let mut blocks: Vec<Block> = Vec::with_capacity(values.len());
    for (i, &y) in values.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        blocks.push(Block { mean: y, weight: w, len: 1 });
        while blocks.len() > 1 {
            let last = blocks.len() - 1;
            if blocks[last - 1].mean <= blocks[last].mean {
                break;
            }
            let b = blocks.pop().expect("len > 1");
            let a = blocks.last_mut().expect("len > 1");
            let weight = a.weight + b.weight;
            a.mean = (a.mean * a.weight + b.mean * b.weight) / weight;
            a.weight = weight;
            a.len += b.len;
        }
    }
    let mut i = 0;
    for b in blocks {
        values[i..i + b.len].fill(b.mean);
        i += b.len;
    }
}
