//! Componentwise vector operations: lattice min/max, positive and negative parts,
//! real entrywise powers and a few norms.

use num_rational::Ratio;

use crate::error::{check_dims, Result, VtcpError};

/// Result of [`lattice_ops`].
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub pos_part: Vec<f64>,
    pub neg_part: Vec<f64>,
}

pub fn vmin(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_dims("min operands", x.len(), y.len())?;
    Ok(x.iter().zip(y).map(|(a, b)| a.min(*b)).collect())
}

pub fn vmax(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_dims("max operands", x.len(), y.len())?;
    Ok(x.iter().zip(y).map(|(a, b)| a.max(*b)).collect())
}

pub fn pos_part(x: &[f64]) -> Vec<f64> {
    x.iter().map(|a| a.max(0.0)).collect()
}

pub fn neg_part(x: &[f64]) -> Vec<f64> {
    x.iter().map(|a| (-a).max(0.0)).collect()
}

pub fn lattice_ops(x: &[f64], y: &[f64]) -> Result<Lattice> {
    Ok(Lattice {
        min: vmin(x, y)?,
        max: vmax(x, y)?,
        pos_part: pos_part(x),
        neg_part: neg_part(x),
    })
}

/// Real power `x_i^r` for rational `r = p/q` in lowest terms.
///
/// Odd roots of negative numbers are taken as real roots (`(-8)^(1/3) = -2`); even roots
/// of negative entries are a [`VtcpError::Domain`] error.
pub fn entrywise_power(x: &[f64], r: Ratio<i64>) -> Result<Vec<f64>> {
    let p = *r.numer();
    let q = *r.denom();
    let even_root = q % 2 == 0;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            if even_root && v < 0.0 {
                return Err(VtcpError::Domain(format!(
                    "even root (denominator {q}) of negative entry {i} ({v})"
                )));
            }
            let root = if q == 1 {
                v
            } else if q == 3 {
                v.cbrt()
            } else {
                v.signum() * v.abs().powf(1.0 / q as f64)
            };
            let out = match i32::try_from(p) {
                Ok(p) => root.powi(p),
                Err(_) => root.powf(p as f64),
            };
            if out.is_finite() {
                Ok(out)
            } else {
                Err(VtcpError::Domain(format!(
                    "power {r} of entry {i} ({v}) is not finite"
                )))
            }
        })
        .collect()
}

pub fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn euclid_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn inf_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
