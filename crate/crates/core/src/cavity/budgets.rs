//! Initialisation and readout budgets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{mev_to_joule, K_B_MEV_PER_K};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Budgets {
    pub e10_mev: f64,
    pub g01_rad_per_ns: f64,
    pub temperature_k: f64,
    /// Thermal excited-state occupation exp(−E10 / k_B T).
    pub thermal_occupation: f64,
    /// E10 / k_B; the operating temperature must sit well below it.
    pub threshold_temperature_k: f64,
    /// Photon emission rate of a qubit tuned to the cavity, ≈ g01, s⁻¹.
    pub readout_rate_per_s: f64,
    /// Detector bandwidth must exceed the readout rate, Hz.
    pub required_bandwidth_hz: f64,
    /// E10 · g01^{1/2}: photon energy per root bandwidth, W/Hz^{1/2}.
    pub nep_w_per_root_hz: f64,
    /// E10 / g01^{1/2} taken literally, J·s^{1/2}.
    pub nep_literal_j_root_s: f64,
}

pub fn budgets(e10_mev: f64, g01_rad_per_ns: f64, temperature_k: f64) -> Result<Budgets> {
    if !(e10_mev > 0.0 && g01_rad_per_ns > 0.0 && e10_mev.is_finite() && g01_rad_per_ns.is_finite()) {
        return Err(Error::config("budgets need positive E10 and g01"));
    }
    if !(temperature_k >= 0.0 && temperature_k.is_finite()) {
        return Err(Error::config("temperature must be non-negative"));
    }
    let thermal_occupation =
        if temperature_k == 0.0 { 0.0 } else { (-e10_mev / (K_B_MEV_PER_K * temperature_k)).exp() };
    let rate = g01_rad_per_ns * 1e9;
    let energy = mev_to_joule(e10_mev);
    Ok(Budgets {
        e10_mev,
        g01_rad_per_ns,
        temperature_k,
        thermal_occupation,
        threshold_temperature_k: e10_mev / K_B_MEV_PER_K,
        readout_rate_per_s: rate,
        required_bandwidth_hz: rate,
        nep_w_per_root_hz: energy * rate.sqrt(),
        nep_literal_j_root_s: energy / rate.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_and_limits() {
        let b = budgets(10.0, 0.48, 4.0).unwrap();
        assert!((b.threshold_temperature_k - 116.045).abs() < 0.01);
        assert!(b.thermal_occupation < 1e-12);
        assert_eq!(budgets(10.0, 0.48, 0.0).unwrap().thermal_occupation, 0.0);
        assert!(budgets(-1.0, 0.48, 4.0).is_err());
        assert!(budgets(10.0, 0.48, -4.0).is_err());
    }
}
