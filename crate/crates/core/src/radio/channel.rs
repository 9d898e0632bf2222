//! Link-level quantities: path loss, SNR and two-hop amplify-and-forward
//! capacity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// A 2-D position in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Log-distance path loss `PL(d) = intercept + slope * log10(d / 1 km)` in dB,
/// optionally with log-normal shadowing applied when a topology is generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub intercept_db: f64,
    pub slope_db_per_decade: f64,
    #[serde(default)]
    pub shadowing_sigma_db: f64,
    #[serde(default = "default_min_distance")]
    pub min_distance_m: f64,
}

fn default_min_distance() -> f64 {
    1.0
}

impl PathLossModel {
    /// Urban macro-cell model, `128.1 + 37.6 log10(d_km)`.
    pub fn urban_macro() -> Self {
        Self {
            intercept_db: 128.1,
            slope_db_per_decade: 37.6,
            shadowing_sigma_db: 0.0,
            min_distance_m: 1.0,
        }
    }

    /// Line-of-sight model for aerial terminals,
    /// `28 + 22 log10(d_m) + 20 log10(f_GHz)`, rewritten in km form.
    pub fn aerial_los(carrier_ghz: f64) -> Self {
        Self {
            intercept_db: 28.0 + 22.0 * 3.0 + 20.0 * carrier_ghz.log10(),
            slope_db_per_decade: 22.0,
            shadowing_sigma_db: 0.0,
            min_distance_m: 1.0,
        }
    }

    /// Deterministic path loss in dB at distance `d` metres. Distances below
    /// the configured minimum are clamped.
    pub fn loss_db(&self, distance_m: f64) -> f64 {
        let d = self.clamp_distance(distance_m);
        self.intercept_db + self.slope_db_per_decade * (d / 1000.0).log10()
    }

    fn clamp_distance(&self, distance_m: f64) -> f64 {
        if distance_m < self.min_distance_m {
            log::warn!(
                "distance {distance_m} m below minimum, clamped to {} m",
                self.min_distance_m
            );
            self.min_distance_m
        } else {
            distance_m
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.intercept_db.is_finite()
            && self.slope_db_per_decade.is_finite()
            && self.shadowing_sigma_db.is_finite();
        if !finite || self.slope_db_per_decade <= 0.0 {
            return Err(Error::Config(
                "path loss slope must be positive and all terms finite".into(),
            ));
        }
        if self.shadowing_sigma_db < 0.0 {
            return Err(Error::Config("shadowing sigma must be >= 0".into()));
        }
        if !(self.min_distance_m > 0.0) {
            return Err(Error::Config("minimum distance must be positive".into()));
        }
        Ok(())
    }
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self::aerial_los(2.0)
    }
}

/// Linear power gain `10^(-PL(d)/10)` between two positions.
pub fn path_gain(a: Point, b: Point, model: &PathLossModel) -> f64 {
    10f64.powf(-model.loss_db(a.distance(&b)) / 10.0)
}

/// Received SNR `P * gain / noise` for a transmit power given in dBm.
pub fn snr(tx_power_dbm: f64, gain: f64, noise_power_w: f64) -> Result<f64> {
    snr_watts(dbm_to_watts(tx_power_dbm), gain, noise_power_w)
}

/// Received SNR for a transmit power given in watts.
pub fn snr_watts(tx_power_w: f64, gain: f64, noise_power_w: f64) -> Result<f64> {
    if !(noise_power_w > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise power must be positive, got {noise_power_w}"
        )));
    }
    if tx_power_w < 0.0 || gain < 0.0 {
        return Err(Error::InvalidArgument(
            "power and gain must be non-negative".into(),
        ));
    }
    Ok(tx_power_w * gain / noise_power_w)
}

/// Capacity in bits/s of a source -> relay -> destination AF link without a
/// direct path. The half factor accounts for the two time slots of each frame.
pub fn af_capacity(snr_source_relay: f64, snr_relay_dest: f64, bandwidth_hz: f64) -> f64 {
    debug_assert!(snr_source_relay >= 0.0 && snr_relay_dest >= 0.0 && bandwidth_hz > 0.0);
    let effective = snr_source_relay * snr_relay_dest / (1.0 + snr_source_relay + snr_relay_dest);
    bandwidth_hz / 2.0 * (1.0 + effective).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn urban_macro_gain_at_one_km() {
        let g = path_gain(
            Point::new(0.0, 0.0),
            Point::new(1000.0, 0.0),
            &PathLossModel::urban_macro(),
        );
        let expected = 10f64.powf(-12.81);
        assert!(((g - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn gain_is_decreasing_in_distance() {
        let m = PathLossModel::default();
        let o = Point::new(0.0, 0.0);
        let mut prev = f64::INFINITY;
        for d in [1.0, 2.0, 10.0, 150.0, 999.0, 1000.0, 2828.0] {
            let g = path_gain(o, Point::new(d, 0.0), &m);
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn zero_distance_is_clamped_to_one_metre() {
        let m = PathLossModel::urban_macro();
        let o = Point::new(5.0, 5.0);
        assert_eq!(path_gain(o, o, &m), path_gain(o, Point::new(6.0, 5.0), &m));
    }

    #[test]
    fn snr_examples() {
        assert_eq!(snr_watts(0.0, 1e-10, 1e-13).unwrap(), 0.0);
        let g = snr(20.0, 1e-10, 1e-13).unwrap();
        assert!((g - 100.0).abs() / 100.0 < 1e-12);
        let g2 = snr(20.0, 2e-10, 1e-13).unwrap();
        assert!((g2 - 2.0 * g).abs() < 1e-9);
        assert!(snr(20.0, 1e-10, 0.0).is_err());
        assert!(snr(20.0, 1e-10, -1.0).is_err());
    }

    #[test]
    fn af_capacity_examples() {
        assert_eq!(af_capacity(0.0, 50.0, 10e6), 0.0);
        // 5e6 * log2(1 + 225/31)
        let c = af_capacity(15.0, 15.0, 10e6);
        let expected = 5e6 * (1.0f64 + 225.0 / 31.0).log2();
        assert!((c - expected).abs() / expected < 1e-12);
        assert!((c / 1e6 - 15.23).abs() < 0.01);
        for (a, b) in [(0.5, 3.0), (10.0, 10.0), (100.0, 2.0)] {
            let bottleneck = 5e6 * (1.0f64 + f64::min(a, b)).log2();
            assert!(af_capacity(a, b, 10e6) < bottleneck);
        }
    }

    #[test]
    fn af_capacity_high_snr_asymptote() {
        let g = 1e6;
        let c = af_capacity(g, g, 10e6);
        let asym = 5e6 * (1.0f64 + g / 2.0).log2();
        assert!(((c - asym) / asym).abs() < 1e-3);
    }

    #[test]
    fn aerial_los_intercept() {
        let m = PathLossModel::aerial_los(2.0);
        assert!((m.intercept_db - 100.0206).abs() < 1e-3);
        assert!((m.loss_db(1.0) - (28.0 + 20.0 * 2f64.log10())).abs() < 1e-9);
    }
}
