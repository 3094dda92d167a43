//! Laplace functionals of the interference fields.
//!
//! All functionals reduce to one generic integral over a kernel `κ`:
//!
//! `F(κ; B, e) = Σ_t B^{2/α_t} ∫_{(e/B)^{1/α_t}}^∞ κ_t(w B^{1/α_t}) / (1 + w^{α_t}) 2πw dw`,
//!
//! which is `Σ_t ∫_{v^{α_t} > e} κ_t(v) 2πv / (1 + v^{α_t}/B) dv` after
//! `v = w B^{1/α_t}`. `B` is the Laplace variable times the interferer's
//! received-power scale and `e` excludes interferers stronger than the
//! serving link.

use std::f64::consts::PI;

use crate::geometry::LinkType;
use crate::quadrature::{integrate_positive, QuadError, QuadratureSpec};

use super::kernel::Kernel;

/// `F(κ; B, e)`.
pub fn functional(kernel: &Kernel, b: f64, e: f64, spec: &QuadratureSpec) -> Result<f64, QuadError> {
    if b <= 0.0 {
        return Ok(0.0);
    }
    let ch = *kernel.channel();
    let mut total = 0.0;
    for t in LinkType::ALL {
        let alpha = ch.alpha(t);
        let scale = b.powf(1.0 / alpha);
        let lower = if e > 0.0 { (e / b).powf(1.0 / alpha) } else { 0.0 };
        if lower.is_infinite() {
            continue;
        }
        let f = |w: f64| {
            let k = kernel.value(t, w * scale);
            if k == 0.0 {
                0.0
            } else {
                k / (1.0 + w.powf(alpha)) * 2.0 * PI * w
            }
        };
        let anchor = lower.max(1.0);
        let est = integrate_positive(f, lower, f64::INFINITY, anchor, spec)?;
        total += b.powf(2.0 / alpha) * est.value;
    }
    Ok(total)
}

/// Mean number of a restricted network's BSs, per unit density, whose home
/// user is a given primary user: `2π Σ_t Q_t(1)`.
pub fn native_count(kernel: &Kernel) -> f64 {
    2.0 * PI * LinkType::ALL.iter().map(|&t| kernel.cumulative(t, 1.0)).sum::<f64>()
}

/// `E_NS(B) = 2π Σ_t Q_t(1) / (1 + (Bξ)^{-1})`, written here in terms of
/// `bx = Bξ`.
pub fn native_term(kernel: &Kernel, bx: f64) -> f64 {
    if bx <= 0.0 {
        return 0.0;
    }
    native_count(kernel) / (1.0 + 1.0 / bx)
}
