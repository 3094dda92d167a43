//! Conversions between logarithmic and linear units.
//!
//! Everything inside the crate is SI and linear; these helpers are for
//! configuration boundaries and report columns.

/// Power ratio in dB to linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

/// Density per km² to density per m².
pub fn per_km2(x: f64) -> f64 {
    x / 1e6
}

/// Density per m² to density per km².
pub fn to_per_km2(x: f64) -> f64 {
    x * 1e6
}
