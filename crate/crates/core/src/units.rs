//! Physical constants and unit conversions.
//!
//! Working units are meV for energy, nm for length, MV/m for field and ns for
//! time. With these choices `q * (1 MV/m) * (1 nm) = 1 meV` exactly.

use std::f64::consts::PI;

/// CODATA 2018 values in SI.
pub mod si {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const Q: f64 = 1.602_176_634e-19;
    pub const M_E: f64 = 9.109_383_701_5e-31;
    pub const EPS0: f64 = 8.854_187_812_8e-12;
    pub const K_B: f64 = 1.380_649e-23;
    pub const C: f64 = 299_792_458.0;
}

/// ħ in meV·ns.
pub const HBAR_MEV_NS: f64 = si::HBAR / si::Q * 1e3 * 1e9;

/// ħ in meV·s.
pub const HBAR_MEV_S: f64 = si::HBAR / si::Q * 1e3;

/// hc in meV·µm.
pub const HC_MEV_UM: f64 = 2.0 * PI * si::HBAR * si::C / si::Q * 1e3 * 1e6;

/// k_B in meV/K.
pub const K_B_MEV_PER_K: f64 = si::K_B / si::Q * 1e3;

/// ħ²/(2 m_e) in meV·nm².
pub const HBAR2_OVER_2ME: f64 = si::HBAR * si::HBAR / (2.0 * si::M_E) / si::Q * 1e3 * 1e18;

/// Energy (meV) to angular frequency (rad/ns).
#[inline]
pub fn mev_to_rad_per_ns(e: f64) -> f64 {
    e / HBAR_MEV_NS
}

/// Angular frequency (rad/ns) to energy (meV).
#[inline]
pub fn rad_per_ns_to_mev(w: f64) -> f64 {
    w * HBAR_MEV_NS
}

pub fn mev_to_joule(e: f64) -> f64 {
    e * 1e-3 * si::Q
}

/// Energy (meV) of an electron displaced by `z_nm` in a field `field_v_per_m`.
#[inline]
pub fn dipole_energy_mev(z_nm: f64, field_v_per_m: f64) -> f64 {
    z_nm * 1e-9 * field_v_per_m * 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_identities() {
        // 1 MV/m across 1 nm is 1 meV for one elementary charge.
        assert!((dipole_energy_mev(1.0, 1e6) - 1.0).abs() < 1e-15);
        assert!((HBAR2_OVER_2ME - 38.099_82).abs() < 1e-4);
        assert!((HBAR_MEV_NS / 6.582119569e-4 - 1.0).abs() < 1e-9);
        assert!((HC_MEV_UM - 1239.84198).abs() < 1e-4);
        assert!((rad_per_ns_to_mev(mev_to_rad_per_ns(3.7)) - 3.7).abs() < 1e-14);
    }
}
