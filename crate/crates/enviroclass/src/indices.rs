//! Air and water quality indices.
//!
//! The air index follows the Indian national convention: each pollutant
//! concentration maps through piecewise-linear breakpoint segments to a
//! sub-index, and the overall index is the maximum sub-index. Above the
//! last tabulated segment the index saturates at 500.
//!
//! The water index is the weighted arithmetic form: each parameter gets a
//! quality rating `q = 100·(V − V_ideal)/(S − V_ideal)` against its ideal
//! value and permissible standard, and ratings are averaged with unit
//! weights proportional to `1/S`, renormalized over the parameters that
//! are actually present.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{AirRecord, WaterAggregate};

/// Air pollutants with breakpoint tables, in fixed tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pollutant {
    So2,
    No2,
    Rspm,
    Spm,
}

impl Pollutant {
    pub const ALL: [Pollutant; 4] = [Pollutant::So2, Pollutant::No2, Pollutant::Rspm, Pollutant::Spm];

    pub fn name(self) -> &'static str {
        match self {
            Pollutant::So2 => "so2",
            Pollutant::No2 => "no2",
            Pollutant::Rspm => "rspm",
            Pollutant::Spm => "spm",
        }
    }
}

impl fmt::Display for Pollutant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pollutant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "so2" => Ok(Pollutant::So2),
            "no2" => Ok(Pollutant::No2),
            "rspm" => Ok(Pollutant::Rspm),
            "spm" => Ok(Pollutant::Spm),
            other => Err(Error::domain(format!("unknown pollutant `{other}`"))),
        }
    }
}

/// Water parameters with rating tables, in fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaterParameter {
    DissolvedOxygen,
    Ph,
    Conductivity,
    Bod,
    Nitrate,
    FecalColiform,
    TotalColiform,
}

impl WaterParameter {
    pub const ALL: [WaterParameter; 7] = [
        WaterParameter::DissolvedOxygen,
        WaterParameter::Ph,
        WaterParameter::Conductivity,
        WaterParameter::Bod,
        WaterParameter::Nitrate,
        WaterParameter::FecalColiform,
        WaterParameter::TotalColiform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WaterParameter::DissolvedOxygen => "do",
            WaterParameter::Ph => "ph",
            WaterParameter::Conductivity => "conductivity",
            WaterParameter::Bod => "bod",
            WaterParameter::Nitrate => "nitrate",
            WaterParameter::FecalColiform => "fecal_coliform",
            WaterParameter::TotalColiform => "total_coliform",
        }
    }

    /// Ideal value: the reading at which the quality rating is zero.
    pub fn ideal(self) -> f64 {
        match self {
            WaterParameter::DissolvedOxygen => 14.6,
            WaterParameter::Ph => 7.0,
            _ => 0.0,
        }
    }

    /// Permissible standard: the reading at which the rating reaches 100.
    pub fn standard(self) -> f64 {
        match self {
            WaterParameter::DissolvedOxygen => 5.0,
            WaterParameter::Ph => 8.5,
            WaterParameter::Conductivity => 1000.0,
            WaterParameter::Bod => 5.0,
            WaterParameter::Nitrate => 45.0,
            WaterParameter::FecalColiform => 100.0,
            WaterParameter::TotalColiform => 1000.0,
        }
    }

    /// Unit weight, proportional to the inverse of the standard.
    pub fn unit_weight(self) -> f64 {
        1.0 / self.standard()
    }
}

impl fmt::Display for WaterParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WaterParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WaterParameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown water parameter `{s}`")))
    }
}

/// Six-band air category, rank 1 (best) through 6 (worst).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AirCategory {
    Good,
    Satisfactory,
    Moderate,
    Poor,
    VeryPoor,
    Severe,
}

impl AirCategory {
    pub const ALL: [AirCategory; 6] = [
        AirCategory::Good,
        AirCategory::Satisfactory,
        AirCategory::Moderate,
        AirCategory::Poor,
        AirCategory::VeryPoor,
        AirCategory::Severe,
    ];

    pub fn rank(self) -> u8 {
        self as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            AirCategory::Good => "Good",
            AirCategory::Satisfactory => "Satisfactory",
            AirCategory::Moderate => "Moderate",
            AirCategory::Poor => "Poor",
            AirCategory::VeryPoor => "VeryPoor",
            AirCategory::Severe => "Severe",
        }
    }
}

impl fmt::Display for AirCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Five-band water category, rank 1 (best) through 5 (worst).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WaterCategory {
    Excellent,
    Good,
    Satisfactory,
    Poor,
    Severe,
}

impl WaterCategory {
    pub const ALL: [WaterCategory; 5] = [
        WaterCategory::Excellent,
        WaterCategory::Good,
        WaterCategory::Satisfactory,
        WaterCategory::Poor,
        WaterCategory::Severe,
    ];

    pub fn rank(self) -> u8 {
        self as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            WaterCategory::Excellent => "Excellent",
            WaterCategory::Good => "Good",
            WaterCategory::Satisfactory => "Satisfactory",
            WaterCategory::Poor => "Poor",
            WaterCategory::Severe => "Severe",
        }
    }
}

impl fmt::Display for WaterCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Computed air index: the maximum sub-index and its category.
#[derive(Debug, Clone, PartialEq)]
pub struct AqiResult {
    pub value: f64,
    pub dominant_pollutant: Pollutant,
    pub category: AirCategory,
}

/// Computed water index.
#[derive(Debug, Clone, PartialEq)]
pub struct WqiResult {
    pub value: f64,
    pub category: WaterCategory,
}

/// One breakpoint segment: concentrations `[conc_lo, conc_hi]` map
/// linearly onto index points `[index_lo, index_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub conc_lo: f64,
    pub conc_hi: f64,
    pub index_lo: f64,
    pub index_hi: f64,
}

const fn seg(conc_lo: f64, conc_hi: f64, index_lo: f64, index_hi: f64) -> Segment {
    Segment { conc_lo, conc_hi, index_lo, index_hi }
}

const SO2_SEGMENTS: [Segment; 6] = [
    seg(0.0, 40.0, 0.0, 50.0),
    seg(40.0, 80.0, 50.0, 100.0),
    seg(80.0, 380.0, 100.0, 200.0),
    seg(380.0, 800.0, 200.0, 300.0),
    seg(800.0, 1600.0, 300.0, 400.0),
    seg(1600.0, 2400.0, 400.0, 500.0),
];

const NO2_SEGMENTS: [Segment; 6] = [
    seg(0.0, 40.0, 0.0, 50.0),
    seg(40.0, 80.0, 50.0, 100.0),
    seg(80.0, 180.0, 100.0, 200.0),
    seg(180.0, 280.0, 200.0, 300.0),
    seg(280.0, 400.0, 300.0, 400.0),
    seg(400.0, 520.0, 400.0, 500.0),
];

const RSPM_SEGMENTS: [Segment; 6] = [
    seg(0.0, 50.0, 0.0, 50.0),
    seg(50.0, 100.0, 50.0, 100.0),
    seg(100.0, 250.0, 100.0, 200.0),
    seg(250.0, 350.0, 200.0, 300.0),
    seg(350.0, 430.0, 300.0, 400.0),
    seg(430.0, 510.0, 400.0, 500.0),
];

// rspm table with concentrations scaled by two.
const SPM_SEGMENTS: [Segment; 6] = [
    seg(0.0, 100.0, 0.0, 50.0),
    seg(100.0, 200.0, 50.0, 100.0),
    seg(200.0, 500.0, 100.0, 200.0),
    seg(500.0, 700.0, 200.0, 300.0),
    seg(700.0, 860.0, 300.0, 400.0),
    seg(860.0, 1020.0, 400.0, 500.0),
];

/// Breakpoint table for one pollutant.
pub fn breakpoints(pollutant: Pollutant) -> &'static [Segment; 6] {
    match pollutant {
        Pollutant::So2 => &SO2_SEGMENTS,
        Pollutant::No2 => &NO2_SEGMENTS,
        Pollutant::Rspm => &RSPM_SEGMENTS,
        Pollutant::Spm => &SPM_SEGMENTS,
    }
}

/// Sub-index for one pollutant concentration, in index points.
///
/// Concentrations above the last tabulated breakpoint saturate at 500.
pub fn pollutant_subindex(pollutant: Pollutant, concentration: f64) -> Result<f64> {
    if !concentration.is_finite() || concentration < 0.0 {
        return Err(Error::domain(format!(
            "{pollutant} concentration must be finite and non-negative, got {concentration}"
        )));
    }
    for segment in breakpoints(pollutant) {
        if concentration <= segment.conc_hi {
            let span = segment.conc_hi - segment.conc_lo;
            return Ok(segment.index_lo
                + (segment.index_hi - segment.index_lo) * (concentration - segment.conc_lo) / span);
        }
    }
    Ok(500.0)
}

/// Concentration whose sub-index equals `index` (inverse interpolation).
/// Used by the synthetic data generator.
pub(crate) fn concentration_for_subindex(pollutant: Pollutant, index: f64) -> f64 {
    let table = breakpoints(pollutant);
    for segment in table {
        if index <= segment.index_hi {
            let span = segment.index_hi - segment.index_lo;
            return segment.conc_lo
                + (segment.conc_hi - segment.conc_lo) * (index - segment.index_lo) / span;
        }
    }
    table[5].conc_hi
}

/// Air category for an index value.
pub fn aqi_category(value: f64) -> Result<AirCategory> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::domain(format!("air index must be non-negative, got {value}")));
    }
    Ok(match value {
        v if v <= 50.0 => AirCategory::Good,
        v if v <= 100.0 => AirCategory::Satisfactory,
        v if v <= 200.0 => AirCategory::Moderate,
        v if v <= 300.0 => AirCategory::Poor,
        v if v <= 400.0 => AirCategory::VeryPoor,
        _ => AirCategory::Severe,
    })
}

/// Overall air index: maximum sub-index over the present pollutants.
/// Ties go to the earlier pollutant in declaration order.
pub fn compute_aqi(record: &AirRecord) -> Result<AqiResult> {
    let mut best: Option<(Pollutant, f64)> = None;
    for (pollutant, value) in Pollutant::ALL.into_iter().zip(record.measurements()) {
        let Some(concentration) = value else { continue };
        let subindex = pollutant_subindex(pollutant, concentration)?;
        match best {
            Some((_, current)) if subindex <= current => {}
            _ => best = Some((pollutant, subindex)),
        }
    }
    let (dominant_pollutant, value) = best.ok_or_else(|| {
        Error::domain(format!("air record for `{}` has no pollutant measurements", record.state))
    })?;
    Ok(AqiResult {
        value,
        dominant_pollutant,
        category: aqi_category(value)?,
    })
}

/// Quality rating `q` for one water parameter reading.
///
/// `q = 100·(V − V_ideal)/(S − V_ideal)`, clamped below at zero.
/// Dissolved oxygen has its ideal above its standard, so the same formula
/// rates low oxygen as poor quality.
pub fn water_quality_rating(parameter: WaterParameter, value: f64) -> Result<f64> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::domain(format!(
            "{parameter} reading must be finite and non-negative, got {value}"
        )));
    }
    if parameter == WaterParameter::Ph && value > 14.0 {
        return Err(Error::domain(format!("ph reading must lie in [0, 14], got {value}")));
    }
    let q = 100.0 * (value - parameter.ideal()) / (parameter.standard() - parameter.ideal());
    Ok(q.max(0.0))
}

/// Reading whose quality rating equals `q` (inverse of the rating map).
/// Used by the synthetic data generator.
pub(crate) fn value_for_rating(parameter: WaterParameter, q: f64) -> f64 {
    parameter.ideal() + q / 100.0 * (parameter.standard() - parameter.ideal())
}

/// Water category for an index value.
pub fn wqi_category(value: f64) -> Result<WaterCategory> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::domain(format!("water index must be non-negative, got {value}")));
    }
    Ok(match value {
        v if v <= 25.0 => WaterCategory::Excellent,
        v if v <= 50.0 => WaterCategory::Good,
        v if v <= 75.0 => WaterCategory::Satisfactory,
        v if v <= 100.0 => WaterCategory::Poor,
        _ => WaterCategory::Severe,
    })
}

/// Weighted arithmetic water index over the present parameters.
pub fn compute_wqi(aggregate: &WaterAggregate) -> Result<WqiResult> {
    let mut weighted_sum = 0.0;
    let mut weight_sum = 0.0;
    for (parameter, value) in WaterParameter::ALL.into_iter().zip(aggregate.measurements()) {
        let Some(v) = value else { continue };
        let q = water_quality_rating(parameter, v)?;
        weighted_sum += parameter.unit_weight() * q;
        weight_sum += parameter.unit_weight();
    }
    if weight_sum == 0.0 {
        return Err(Error::domain(format!(
            "water aggregate for `{}` has no parameter measurements",
            aggregate.state
        )));
    }
    let value = weighted_sum / weight_sum;
    Ok(WqiResult {
        value,
        category: wqi_category(value)?,
    })
}
