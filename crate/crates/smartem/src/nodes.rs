//! Behavioral models of the five node classes: donor gNB, IAB node,
//! amplify-and-forward repeater, RIS and fixed passive skin.
//!
//! Conventions: world azimuths and surface angles are degrees (0° = +x,
//! counterclockwise); distances are meters; powers dBm; gains dB/dBi.

use serde::Serialize;

use crate::arrays::classical_quantization_loss_db;
use crate::em::{shannon_capacity_bps, snr_db, LinkBudgetTerms};
use crate::scenario::{angular_separation_deg, PlacedNode, RadioParams};
use crate::{wavelength_m, Error, Result};

pub const DEFAULT_GNB_EIRP_DBM: f64 = 65.0;
pub const DEFAULT_GNB_ANTENNA_GAIN_DBI: f64 = 33.0;
pub const DEFAULT_GNB_HEIGHT_M: f64 = 10.0;
pub const DEFAULT_GNB_POWER_W: f64 = 800.0;
pub const DEFAULT_IAB_EIRP_DBM: f64 = 60.0;
pub const DEFAULT_IAB_POWER_W: f64 = 350.0;
pub const DEFAULT_IAB_RX_GAIN_DBI: f64 = 0.0;
pub const DEFAULT_REPEATER_E2E_GAIN_DB: f64 = 90.0;
pub const DEFAULT_REPEATER_MAX_EIRP_DBM: f64 = 58.0;
pub const DEFAULT_REPEATER_MARGIN_DB: f64 = 10.0;
pub const DEFAULT_REPEATER_POWER_W: f64 = 20.0;
pub const DEFAULT_RIS_SIDE_M: f64 = 0.25;
pub const DEFAULT_RIS_BITS: u8 = 2;
pub const DEFAULT_RIS_ELEMENT_POWER_MW: f64 = 0.5;
pub const DEFAULT_SKIN_SIDE_M: f64 = 0.5;
pub const DEFAULT_SKIN_TOLERANCE_DEG: f64 = 5.0;

/// SNR penalty on repeater-served capacity, standing in for amplified noise.
pub const REPEATER_SNR_PENALTY_DB: f64 = 3.0;

/// Node class parameters. Tagged by `kind` in scenario JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeSpec {
    Gnb(GnbSpec),
    Iab(IabSpec),
    Repeater(RepeaterSpec),
    Ris(RisSpec),
    Skin(SkinSpec),
}

impl NodeSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            NodeSpec::Gnb(_) => "gnb",
            NodeSpec::Iab(_) => "iab",
            NodeSpec::Repeater(_) => "repeater",
            NodeSpec::Ris(_) => "ris",
            NodeSpec::Skin(_) => "skin",
        }
    }
}

/// Donor base station with wired backhaul.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GnbSpec {
    pub eirp_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub power_w: f64,
}

/// How an IAB node divides its half-duplex airtime between access and
/// backhaul.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResourceSplit {
    /// Maximize end-to-end capacity per served UE.
    Optimal,
    /// Fixed backhaul share α ∈ (0,1); access gets 1−α.
    Fixed(f64),
}

impl Serialize for ResourceSplit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ResourceSplit::Optimal => s.serialize_str("optimal"),
            ResourceSplit::Fixed(a) => s.serialize_f64(*a),
        }
    }
}

/// Regenerative relay sharing radio resources between access and wireless
/// backhaul (half duplex).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IabSpec {
    pub eirp_dbm: f64,
    pub power_w: f64,
    pub rx_gain_dbi: f64,
    pub resource_split: ResourceSplit,
}

/// Amplify-and-forward repeater. Antenna gains are folded into the
/// end-to-end gain figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeaterSpec {
    pub e2e_gain_db: f64,
    pub max_eirp_dbm: f64,
    pub isolation_db: f64,
    pub stability_margin_db: f64,
    pub power_w: f64,
}

/// Reconfigurable reflecting surface; element pitch is fixed at λ/2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RisSpec {
    pub side_m: f64,
    pub bits: u8,
    pub element_power_mw: f64,
}

/// Fully passive surface redirecting one fixed incident azimuth into one
/// fixed departure azimuth; configuration is immutable after scenario load.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkinSpec {
    pub side_m: f64,
    pub incident_azimuth_deg: f64,
    pub departure_azimuth_deg: f64,
    pub tolerance_deg: f64,
}

/// Elements along one side and in total for a square surface with λ/2 pitch.
pub fn ris_element_count(side_m: f64, frequency_hz: f64) -> Result<(u32, u64)> {
    if !(frequency_hz > 0.0) {
        return Err(Error::NonPositive { name: "frequency_hz", value: frequency_hz });
    }
    let pitch_m = wavelength_m(frequency_hz) / 2.0;
    let per_side = (side_m / pitch_m).floor();
    if per_side < 1.0 {
        return Err(Error::SurfaceTooSmall { side_m, pitch_m });
    }
    let per_side = per_side as u32;
    Ok((per_side, u64::from(per_side) * u64::from(per_side)))
}

/// Scalar bistatic reflection gain of a square aperture of area A = side²:
/// 10·log10((4π·A/λ²)² · cosθi · cosθo) minus the phase-quantization loss,
/// clamped below at 0 dB. Angles are measured from the surface normal.
pub fn ris_bistatic_gain_db(
    side_m: f64,
    frequency_hz: f64,
    theta_i_deg: f64,
    theta_o_deg: f64,
    bits: Option<u8>,
) -> Result<f64> {
    for (name, theta) in [("theta_i_deg", theta_i_deg), ("theta_o_deg", theta_o_deg)] {
        if !(0.0..90.0).contains(&theta) {
            return Err(Error::AngleOutOfRange(format!(
                "{name} = {theta}, surface angles must lie in [0°, 90°)"
            )));
        }
    }
    let lambda = wavelength_m(frequency_hz);
    let aperture = 4.0 * std::f64::consts::PI * side_m * side_m / (lambda * lambda);
    let gain = 20.0 * aperture.log10()
        + 10.0 * (theta_i_deg.to_radians().cos() * theta_o_deg.to_radians().cos()).log10()
        - bits.map_or(0.0, classical_quantization_loss_db);
    Ok(gain.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeaterStatus {
    Nominal,
    Reduced,
    Off,
}

/// Operating gain after the isolation check: full E2E gain when it fits
/// under isolation − margin, reduced to that headroom when it does not,
/// off when no positive headroom exists.
pub fn repeater_effective_gain_db(spec: &RepeaterSpec) -> (Option<f64>, RepeaterStatus) {
    let headroom = spec.isolation_db - spec.stability_margin_db;
    if spec.e2e_gain_db <= headroom {
        (Some(spec.e2e_gain_db), RepeaterStatus::Nominal)
    } else if headroom > 0.0 {
        (Some(headroom), RepeaterStatus::Reduced)
    } else {
        (None, RepeaterStatus::Off)
    }
}

/// Half-duplex end-to-end capacity through one IAB hop given backhaul and
/// access link capacities. The optimal split is the maximum over α of
/// min(α·Cb, (1−α)·Ca), reached where both sides meet: Ca·Cb/(Ca+Cb).
pub fn iab_end_to_end_capacity(backhaul_bps: f64, access_bps: f64, split: ResourceSplit) -> f64 {
    if backhaul_bps <= 0.0 || access_bps <= 0.0 {
        return 0.0;
    }
    match split {
        // access_bps·(backhaul/(sum)) returns exactly C/2 when the two
        // capacities are equal.
        ResourceSplit::Optimal => access_bps * (backhaul_bps / (backhaul_bps + access_bps)),
        ResourceSplit::Fixed(alpha) => {
            (alpha * backhaul_bps).min((1.0 - alpha) * access_bps)
        }
    }
}

/// Geometry summary for one gNB → node → UE path, precomputed by the
/// caller. Surface angles are meaningful only for RIS/skin nodes.
#[derive(Debug, Clone, Copy)]
pub struct RelayGeometry {
    pub d1_m: f64,
    pub d2_m: f64,
    pub penetration1_db: f64,
    pub penetration2_db: f64,
    /// Angle from surface normal toward the gNB.
    pub theta_i_deg: f64,
    /// Angle from surface normal toward the UE.
    pub theta_o_deg: f64,
    /// World azimuth from the surface toward the gNB.
    pub incident_azimuth_deg: f64,
    /// World azimuth from the surface toward the UE.
    pub departure_azimuth_deg: f64,
}

/// One candidate serving path, ready for best-path selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEval {
    pub terms: LinkBudgetTerms,
    pub snr_db: f64,
    pub capacity_bps: f64,
}

/// Composes received power and capacity for a gNB → node → UE path.
/// Returns `None` when the node cannot serve this geometry (surface faced
/// away, skin configured for other directions, repeater off).
pub fn relay_path(
    gnb: &GnbSpec,
    node: &PlacedNode,
    geo: &RelayGeometry,
    radio: &RadioParams,
) -> Result<Option<PathEval>> {
    let eval = |terms: LinkBudgetTerms, snr_penalty_db: f64| -> Result<PathEval> {
        let snr =
            snr_db(terms.rx_power_dbm, radio.bandwidth_hz, radio.noise_figure_db)? - snr_penalty_db;
        let capacity = shannon_capacity_bps(
            terms.rx_power_dbm - snr_penalty_db,
            radio.bandwidth_hz,
            radio.noise_figure_db,
        )?;
        Ok(PathEval { terms, snr_db: snr, capacity_bps: capacity })
    };
    let fspl1 = crate::em::fspl_db(geo.d1_m, radio.carrier_frequency_hz)?;
    let fspl2 = crate::em::fspl_db(geo.d2_m, radio.carrier_frequency_hz)?;
    match &node.spec {
        NodeSpec::Gnb(_) => Err(Error::Scenario(format!(
            "node '{}': a gNB cannot act as a relay",
            node.name
        ))),
        NodeSpec::Iab(iab) => {
            // Regenerative: downstream segment is a fresh transmission at the
            // IAB's own EIRP; end-to-end capacity is the half-duplex split of
            // the two link capacities. Received power at the UE is the access
            // segment's.
            let backhaul = LinkBudgetTerms::new(
                gnb.eirp_dbm,
                fspl1,
                0.0,
                geo.penetration1_db,
                iab.rx_gain_dbi,
            );
            let access = LinkBudgetTerms::new(
                iab.eirp_dbm,
                fspl2,
                0.0,
                geo.penetration2_db,
                radio.ue_antenna_gain_dbi,
            );
            let cb = shannon_capacity_bps(
                backhaul.rx_power_dbm,
                radio.bandwidth_hz,
                radio.noise_figure_db,
            )?;
            let ca = shannon_capacity_bps(
                access.rx_power_dbm,
                radio.bandwidth_hz,
                radio.noise_figure_db,
            )?;
            let capacity = iab_end_to_end_capacity(cb, ca, iab.resource_split);
            let snr = snr_db(access.rx_power_dbm, radio.bandwidth_hz, radio.noise_figure_db)?;
            Ok(Some(PathEval { terms: access, snr_db: snr, capacity_bps: capacity }))
        }
        NodeSpec::Repeater(rep) => {
            let (gain, status) = repeater_effective_gain_db(rep);
            let Some(gain) = gain else { return Ok(None) };
            debug_assert_ne!(status, RepeaterStatus::Off);
            let p_in = gnb.eirp_dbm - fspl1 - geo.penetration1_db;
            // Output EIRP capped; fold the cap into the extra-gain term so
            // the additive ledger stays exact.
            let out_eirp = (p_in + gain).min(rep.max_eirp_dbm);
            let applied_gain = out_eirp - p_in;
            let terms = LinkBudgetTerms::new(
                gnb.eirp_dbm,
                fspl1 + fspl2,
                applied_gain,
                geo.penetration1_db + geo.penetration2_db,
                radio.ue_antenna_gain_dbi,
            );
            Ok(Some(eval(terms, REPEATER_SNR_PENALTY_DB)?))
        }
        NodeSpec::Ris(ris) => {
            if !front_half_space(geo.theta_i_deg) || !front_half_space(geo.theta_o_deg) {
                return Ok(None);
            }
            let gain = ris_bistatic_gain_db(
                ris.side_m,
                radio.carrier_frequency_hz,
                geo.theta_i_deg,
                geo.theta_o_deg,
                Some(ris.bits),
            )?;
            let terms = LinkBudgetTerms::new(
                gnb.eirp_dbm,
                fspl1 + fspl2,
                gain,
                geo.penetration1_db + geo.penetration2_db,
                radio.ue_antenna_gain_dbi,
            );
            Ok(Some(eval(terms, 0.0)?))
        }
        NodeSpec::Skin(skin) => {
            if !front_half_space(geo.theta_i_deg) || !front_half_space(geo.theta_o_deg) {
                return Ok(None);
            }
            let incident_off =
                angular_separation_deg(geo.incident_azimuth_deg, skin.incident_azimuth_deg);
            let departure_off =
                angular_separation_deg(geo.departure_azimuth_deg, skin.departure_azimuth_deg);
            if incident_off > skin.tolerance_deg || departure_off > skin.tolerance_deg {
                return Ok(None);
            }
            let gain = ris_bistatic_gain_db(
                skin.side_m,
                radio.carrier_frequency_hz,
                geo.theta_i_deg,
                geo.theta_o_deg,
                None,
            )?;
            let terms = LinkBudgetTerms::new(
                gnb.eirp_dbm,
                fspl1 + fspl2,
                gain,
                geo.penetration1_db + geo.penetration2_db,
                radio.ue_antenna_gain_dbi,
            );
            Ok(Some(eval(terms, 0.0)?))
        }
    }
}

fn front_half_space(theta_deg: f64) -> bool {
    (0.0..90.0).contains(&theta_deg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Point3;
    use proptest::prelude::*;

    fn radio() -> RadioParams {
        RadioParams::default()
    }

    fn placed(spec: NodeSpec) -> PlacedNode {
        PlacedNode { name: "n".into(), position: Point3::new(0.0, 0.0, 6.0), orientation_deg: 0.0, spec }
    }

    fn gnb() -> GnbSpec {
        GnbSpec { eirp_dbm: 65.0, antenna_gain_dbi: 33.0, power_w: 800.0 }
    }

    fn geometry(d1: f64, d2: f64) -> RelayGeometry {
        RelayGeometry {
            d1_m: d1,
            d2_m: d2,
            penetration1_db: 0.0,
            penetration2_db: 0.0,
            theta_i_deg: 0.0,
            theta_o_deg: 0.0,
            incident_azimuth_deg: 0.0,
            departure_azimuth_deg: 90.0,
        }
    }

    #[test]
    fn ris_element_counts_at_28ghz() {
        // λ = c/28e9 ≈ 10.707 mm, pitch ≈ 5.353 mm.
        assert_eq!(ris_element_count(0.25, 28e9).unwrap(), (46, 2116));
        assert_eq!(ris_element_count(0.50, 28e9).unwrap(), (93, 8649));
        let pitch = crate::wavelength_m(28e9) / 2.0;
        assert_eq!(ris_element_count(pitch, 28e9).unwrap(), (1, 1));
        assert!(ris_element_count(pitch * 0.99, 28e9).is_err());
    }

    #[test]
    fn ris_gain_unit_aperture_identity() {
        // A = λ²/4π makes the aperture factor exactly 1 → 0 dB.
        let side = crate::wavelength_m(28e9) / (4.0 * std::f64::consts::PI).sqrt();
        let g = ris_bistatic_gain_db(side, 28e9, 0.0, 0.0, None).unwrap();
        assert!(g.abs() < 1e-9, "g={g}");
    }

    #[test]
    fn ris_gain_quarter_meter_surface_at_normal() {
        // 20·log10(4π·0.0625/λ²) with λ = c/28 GHz evaluates to 76.716 dB.
        let g = ris_bistatic_gain_db(0.25, 28e9, 0.0, 0.0, None).unwrap();
        assert!((g - 76.716).abs() < 5e-3, "g={g}");
        let g1 = ris_bistatic_gain_db(0.25, 28e9, 0.0, 0.0, Some(1)).unwrap();
        assert!((g1 - (g - 3.9224)).abs() < 5e-4, "g1={g1}");
    }

    #[test]
    fn ris_gain_clamps_at_zero() {
        let g = ris_bistatic_gain_db(0.001, 28e9, 80.0, 80.0, Some(1)).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn ris_gain_rejects_grazing_angles() {
        assert!(ris_bistatic_gain_db(0.25, 28e9, 90.0, 0.0, None).is_err());
        assert!(ris_bistatic_gain_db(0.25, 28e9, 0.0, 95.0, None).is_err());
        assert!(ris_bistatic_gain_db(0.25, 28e9, -5.0, 0.0, None).is_err());
    }

    #[test]
    fn ris_gain_symmetric_and_monotone_in_obliquity() {
        let g = |ti: f64, to: f64| ris_bistatic_gain_db(0.25, 28e9, ti, to, Some(2)).unwrap();
        assert_eq!(g(20.0, 65.0), g(65.0, 20.0));
        let mut prev = g(0.0, 30.0);
        for ti in [10.0, 25.0, 45.0, 60.0, 80.0, 89.0] {
            let cur = g(ti, 30.0);
            assert!(cur <= prev, "gain rose at θi={ti}");
            prev = cur;
        }
    }

    #[test]
    fn repeater_state_boundaries() {
        let spec = |gain, iso, margin| RepeaterSpec {
            e2e_gain_db: gain,
            max_eirp_dbm: 58.0,
            isolation_db: iso,
            stability_margin_db: margin,
            power_w: 20.0,
        };
        assert_eq!(
            repeater_effective_gain_db(&spec(90.0, 100.0, 10.0)),
            (Some(90.0), RepeaterStatus::Nominal)
        );
        assert_eq!(
            repeater_effective_gain_db(&spec(90.0, 85.0, 10.0)),
            (Some(75.0), RepeaterStatus::Reduced)
        );
        assert_eq!(repeater_effective_gain_db(&spec(90.0, 8.0, 10.0)), (None, RepeaterStatus::Off));
    }

    #[test]
    fn iab_split_closed_form_cases() {
        assert_eq!(iab_end_to_end_capacity(7.0, 7.0, ResourceSplit::Optimal), 3.5);
        assert_eq!(iab_end_to_end_capacity(0.0, 5.0, ResourceSplit::Optimal), 0.0);
        assert_eq!(iab_end_to_end_capacity(5.0, 0.0, ResourceSplit::Optimal), 0.0);
        let c = iab_end_to_end_capacity(3.0, 1.0, ResourceSplit::Optimal);
        assert!((c - 0.75).abs() < 1e-12, "c={c}");
        // Fixed α = 0.25 on the same pair achieves the optimum.
        let fixed = iab_end_to_end_capacity(3.0, 1.0, ResourceSplit::Fixed(0.25));
        assert!((fixed - 0.75).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn iab_optimal_dominates_every_fixed_split(
            ca in 1e3..1e10f64, cb in 1e3..1e10f64, alpha in 0.001..0.999f64) {
            let opt = iab_end_to_end_capacity(cb, ca, ResourceSplit::Optimal);
            let fixed = iab_end_to_end_capacity(cb, ca, ResourceSplit::Fixed(alpha));
            prop_assert!(opt >= fixed - 1e-6 * opt);
            prop_assert!(opt <= ca.min(cb));
        }

        #[test]
        fn repeater_gain_never_exceeds_isolation_headroom(
            gain in 0.0..150.0f64, iso in 0.0..150.0f64, margin in 0.0..30.0f64) {
            let spec = RepeaterSpec {
                e2e_gain_db: gain,
                max_eirp_dbm: 58.0,
                isolation_db: iso,
                stability_margin_db: margin,
                power_w: 20.0,
            };
            let (g, status) = repeater_effective_gain_db(&spec);
            let headroom = iso - margin;
            match g {
                Some(g) => {
                    prop_assert!(g <= headroom + 1e-12);
                    prop_assert!(status != RepeaterStatus::Off);
                }
                None => {
                    prop_assert_eq!(status, RepeaterStatus::Off);
                    prop_assert!(headroom <= 0.0);
                }
            }
        }
    }

    #[test]
    fn relay_ris_path_composes_link_budget() {
        // 65 dBm − fspl(50 m) + bistatic gain(2-bit) − fspl(30 m):
        // 65 − 95.370 + (76.716 − 0.912) − 90.933 ≈ −45.50 dBm.
        let ris = placed(NodeSpec::Ris(RisSpec { side_m: 0.25, bits: 2, element_power_mw: 0.5 }));
        let path = relay_path(&gnb(), &ris, &geometry(50.0, 30.0), &radio()).unwrap().unwrap();
        assert!((path.terms.rx_power_dbm - -45.50).abs() < 0.01, "{}", path.terms.rx_power_dbm);
        assert!(path.terms.ledger_holds());
    }

    #[test]
    fn relay_ris_discards_back_half_space() {
        let ris = placed(NodeSpec::Ris(RisSpec { side_m: 0.25, bits: 2, element_power_mw: 0.5 }));
        let mut geo = geometry(50.0, 30.0);
        geo.theta_o_deg = 120.0;
        assert!(relay_path(&gnb(), &ris, &geo, &radio()).unwrap().is_none());
    }

    #[test]
    fn relay_skin_serves_only_its_configured_pair() {
        let skin = placed(NodeSpec::Skin(SkinSpec {
            side_m: 0.5,
            incident_azimuth_deg: 0.0,
            departure_azimuth_deg: 90.0,
            tolerance_deg: 5.0,
        }));
        let matched = relay_path(&gnb(), &skin, &geometry(50.0, 30.0), &radio()).unwrap();
        assert!(matched.is_some());
        let mut off = geometry(50.0, 30.0);
        off.departure_azimuth_deg = 110.0; // 20° away from the configured beam
        assert!(relay_path(&gnb(), &skin, &off, &radio()).unwrap().is_none());
        let mut off_in = geometry(50.0, 30.0);
        off_in.incident_azimuth_deg = 10.0;
        assert!(relay_path(&gnb(), &skin, &off_in, &radio()).unwrap().is_none());
    }

    #[test]
    fn relay_repeater_off_discards_path() {
        let rep = placed(NodeSpec::Repeater(RepeaterSpec {
            e2e_gain_db: 90.0,
            max_eirp_dbm: 58.0,
            isolation_db: 8.0,
            stability_margin_db: 10.0,
            power_w: 20.0,
        }));
        assert!(relay_path(&gnb(), &rep, &geometry(50.0, 30.0), &radio()).unwrap().is_none());
    }

    #[test]
    fn relay_repeater_caps_output_eirp() {
        let rep = placed(NodeSpec::Repeater(RepeaterSpec {
            e2e_gain_db: 90.0,
            max_eirp_dbm: 58.0,
            isolation_db: 120.0,
            stability_margin_db: 10.0,
            power_w: 20.0,
        }));
        // d1 = 10 m: input −16.39 dBm, +90 dB would exceed the cap, so the
        // output pins at 58 dBm and rx = 58 − fspl(30 m) ≈ −32.93 dBm.
        let path = relay_path(&gnb(), &rep, &geometry(10.0, 30.0), &radio()).unwrap().unwrap();
        assert!((path.terms.rx_power_dbm - -32.93).abs() < 0.01, "{}", path.terms.rx_power_dbm);
        assert!(path.terms.ledger_holds());
        // Reconstruct the radiated EIRP from the ledger: it must respect the cap.
        let fspl1 = crate::em::fspl_db(10.0, 28e9).unwrap();
        let out_eirp = path.terms.eirp_dbm - fspl1 + path.terms.extra_gain_db;
        assert!(out_eirp <= 58.0 + 1e-9, "out_eirp={out_eirp}");
        // Far input: no capping, full 90 dB applied.
        let far = relay_path(&gnb(), &rep, &geometry(500.0, 30.0), &radio()).unwrap().unwrap();
        assert!((far.terms.extra_gain_db - 90.0).abs() < 1e-9);
    }

    #[test]
    fn relay_repeater_applies_snr_penalty_to_capacity() {
        let rep = placed(NodeSpec::Repeater(RepeaterSpec {
            e2e_gain_db: 90.0,
            max_eirp_dbm: 58.0,
            isolation_db: 120.0,
            stability_margin_db: 10.0,
            power_w: 20.0,
        }));
        let path = relay_path(&gnb(), &rep, &geometry(100.0, 30.0), &radio()).unwrap().unwrap();
        let r = radio();
        let unpenalized =
            crate::em::snr_db(path.terms.rx_power_dbm, r.bandwidth_hz, r.noise_figure_db).unwrap();
        assert!((path.snr_db - (unpenalized - REPEATER_SNR_PENALTY_DB)).abs() < 1e-9);
        let unpenalized_cap = crate::em::shannon_capacity_bps(
            path.terms.rx_power_dbm,
            r.bandwidth_hz,
            r.noise_figure_db,
        )
        .unwrap();
        assert!(path.capacity_bps < unpenalized_cap);
    }

    #[test]
    fn relay_iab_regenerates_and_halves_symmetric_links() {
        let iab = placed(NodeSpec::Iab(IabSpec {
            eirp_dbm: 65.0, // match the donor so both segments are identical
            power_w: 350.0,
            rx_gain_dbi: 0.0,
            resource_split: ResourceSplit::Optimal,
        }));
        let path = relay_path(&gnb(), &iab, &geometry(40.0, 40.0), &radio()).unwrap().unwrap();
        let r = radio();
        let seg_cap = crate::em::shannon_capacity_bps(
            path.terms.rx_power_dbm,
            r.bandwidth_hz,
            r.noise_figure_db,
        )
        .unwrap();
        assert_eq!(path.capacity_bps, seg_cap / 2.0);
        // Received power comes from the IAB's own EIRP, not the donor chain.
        let expected_rx = 65.0 - crate::em::fspl_db(40.0, 28e9).unwrap();
        assert!((path.terms.rx_power_dbm - expected_rx).abs() < 1e-9);
    }

    #[test]
    fn relay_rejects_gnb_as_relay() {
        let g = placed(NodeSpec::Gnb(gnb()));
        assert!(relay_path(&gnb(), &g, &geometry(50.0, 30.0), &radio()).is_err());
    }

    proptest! {
        #[test]
        fn passive_surface_never_beats_regenerated_first_segment(
            d1 in 10.0..200.0f64,
            // Far field of a 0.5 m aperture at 28 GHz starts near 47 m.
            d2 in 50.0..200.0f64,
            side in 0.25..0.5f64,
            ti in 0.0..80.0f64,
            to in 0.0..80.0f64) {
            let ris = placed(NodeSpec::Ris(RisSpec { side_m: side, bits: 4, element_power_mw: 0.5 }));
            let mut geo = geometry(d1, d2);
            geo.theta_i_deg = ti;
            geo.theta_o_deg = to;
            let path = relay_path(&gnb(), &ris, &geo, &radio()).unwrap().unwrap();
            // What an IAB at the same spot would have received on segment 1.
            let backhaul_rx = 65.0 - crate::em::fspl_db(d1, 28e9).unwrap();
            prop_assert!(path.terms.rx_power_dbm <= backhaul_rx + 1e-9);
        }
    }
}
