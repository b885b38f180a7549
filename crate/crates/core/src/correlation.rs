//! Classical correlation coefficients.

use crate::error::{Error, Result};

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// True when every entry equals the first one. Centering such a vector in
/// floating point can leave rounding residue, so constancy is tested exactly.
pub(crate) fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::TooFewObservations {
            got: x.len(),
            min: 2,
        });
    }
    if is_constant(x) {
        return Err(Error::DegenerateVariance("first argument is constant".into()));
    }
    if is_constant(y) {
        return Err(Error::DegenerateVariance("second argument is constant".into()));
    }
    Ok(())
}

/// Product-moment correlation. Errors on constant input instead of
/// returning NaN.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateVariance("zero sum of squares".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn midranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && v[order[j]] == v[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean of (i+1)..=j
        let r = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = r;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation: Pearson on midranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&midranks(x), &midranks(y))
}
