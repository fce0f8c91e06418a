//! Decibel and distance conversions.

use crate::error::{Error, Result};
use crate::real::Real;

/// Convert a loss in dB to a linear transmittance in (0, 1].
pub fn db_to_linear<R: Real>(loss_db: R) -> Result<R> {
    if !loss_db.is_finite() || loss_db < R::zero() {
        return Err(Error::Domain(format!("loss must be finite and non-negative, got {loss_db:?}")));
    }
    Ok(R::of(10.0).powf(-loss_db / R::of(10.0)))
}

/// Convert a linear transmittance in (0, 1] back to a loss in dB.
pub fn linear_to_db<R: Real>(transmittance: R) -> Result<R> {
    if !(transmittance > R::zero() && transmittance <= R::one()) {
        return Err(Error::Domain(format!("transmittance must lie in (0, 1], got {transmittance:?}")));
    }
    Ok(-R::of(10.0) * transmittance.log10())
}

/// Fiber length that produces the given loss at the given attenuation.
pub fn loss_to_distance_km<R: Real>(loss_db: R, attenuation_db_per_km: R) -> Result<R> {
    if !(attenuation_db_per_km > R::zero()) {
        return Err(Error::Domain("attenuation must be positive".into()));
    }
    if !loss_db.is_finite() || loss_db < R::zero() {
        return Err(Error::Domain("loss must be finite and non-negative".into()));
    }
    Ok(loss_db / attenuation_db_per_km)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decade_points() {
        assert_eq!(db_to_linear(0.0f64).unwrap(), 1.0);
        assert!((db_to_linear(10.0f64).unwrap() - 0.1).abs() < 1e-15);
        // 10^(-1.396), high-precision reference value.
        assert!((db_to_linear(13.96f64).unwrap() - 0.040179081084894).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(db_to_linear(-1.0f64).is_err());
        assert!(db_to_linear(f64::NAN).is_err());
        assert!(linear_to_db(0.0f64).is_err());
        assert!(linear_to_db(1.5f64).is_err());
        assert!(loss_to_distance_km(10.0f64, 0.0).is_err());
        assert!(loss_to_distance_km(10.0f64, -0.31).is_err());
    }

    #[test]
    fn paper_distances() {
        let d1: f64 = loss_to_distance_km(13.96, 0.31).unwrap();
        let d2: f64 = loss_to_distance_km(23.19, 0.31).unwrap();
        assert!(((d1 * 10.0).round() / 10.0 - 45.0).abs() < 1e-9);
        assert!(((d2 * 10.0).round() / 10.0 - 74.8).abs() < 1e-9);
        assert_eq!(loss_to_distance_km(0.0f64, 0.31).unwrap(), 0.0);
    }

    #[test]
    fn round_trip_identity() {
        for loss in [0.0f64, 0.01, 3.0, 13.96, 23.19, 60.0] {
            let back = linear_to_db(db_to_linear(loss).unwrap()).unwrap();
            assert!((back - loss).abs() <= 1e-12 * loss.max(1.0));
        }
    }

    #[test]
    fn monotone_decreasing() {
        let mut prev = db_to_linear(0.0f32).unwrap();
        for i in 1..100 {
            let t = db_to_linear(i as f32 * 0.5).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }
}
