//! Scalar link-budget math: free-space path loss, thermal noise, SNR and
//! Shannon capacity. Everything stays in the dB domain; conversion to linear
//! happens only inside the capacity formula.

use crate::{Error, Result, SPEED_OF_LIGHT};

/// Free-space path loss in dB: 20·log10(4π·d·f / c).
pub fn fspl_db(distance_m: f64, frequency_hz: f64) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::NonPositive { name: "distance_m", value: distance_m });
    }
    if !(frequency_hz > 0.0) {
        return Err(Error::NonPositive { name: "frequency_hz", value: frequency_hz });
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * distance_m * frequency_hz / SPEED_OF_LIGHT).log10())
}

/// Thermal noise floor at 290 K plus receiver noise figure, in dBm:
/// −174 + 10·log10(B) + NF.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::NonPositive { name: "bandwidth_hz", value: bandwidth_hz });
    }
    Ok(-174.0 + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

/// SNR in dB for a received power against the noise floor.
pub fn snr_db(rx_power_dbm: f64, bandwidth_hz: f64, noise_figure_db: f64) -> Result<f64> {
    Ok(rx_power_dbm - noise_power_dbm(bandwidth_hz, noise_figure_db)?)
}

/// Shannon capacity B·log2(1 + SNR) in bit/s. Deep fades give a small
/// positive capacity rather than an error.
pub fn shannon_capacity_bps(
    rx_power_dbm: f64,
    bandwidth_hz: f64,
    noise_figure_db: f64,
) -> Result<f64> {
    let snr_linear = db_to_linear(snr_db(rx_power_dbm, bandwidth_hz, noise_figure_db)?);
    Ok(bandwidth_hz * (1.0 + snr_linear).log2())
}

/// Power ratio from dB.
pub fn db_to_linear(db: f64) -> f64 {
    10.0_f64.powf(db / 10.0)
}

/// dB from a power ratio.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Additive ledger for one link. `rx_power_dbm` is derived in the
/// constructor so the identity
/// rx = eirp − path_loss + extra_gain − penetration + rx_gain
/// holds bit-exactly on every instance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinkBudgetTerms {
    pub eirp_dbm: f64,
    pub path_loss_db: f64,
    pub extra_gain_db: f64,
    pub penetration_db: f64,
    pub rx_gain_dbi: f64,
    pub rx_power_dbm: f64,
}

impl LinkBudgetTerms {
    pub fn new(
        eirp_dbm: f64,
        path_loss_db: f64,
        extra_gain_db: f64,
        penetration_db: f64,
        rx_gain_dbi: f64,
    ) -> Self {
        let rx_power_dbm = eirp_dbm - path_loss_db + extra_gain_db - penetration_db + rx_gain_dbi;
        Self { eirp_dbm, path_loss_db, extra_gain_db, penetration_db, rx_gain_dbi, rx_power_dbm }
    }

    /// Re-evaluates the ledger identity with the same expression shape used
    /// in the constructor.
    pub fn ledger_holds(&self) -> bool {
        self.rx_power_dbm
            == self.eirp_dbm - self.path_loss_db + self.extra_gain_db - self.penetration_db
                + self.rx_gain_dbi
    }
}
