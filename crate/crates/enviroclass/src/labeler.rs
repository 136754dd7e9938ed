//! Overall environment labels.
//!
//! A 6×5 rule table maps every (air category, water category) pair to one
//! of six overall labels. A handful of cells are pinned by the labeling
//! rules (the whole air-Good row and the same-name diagonal); the rest
//! are filled from a weighted score with air weighted 0.6 and water 0.4,
//! the water rank first stretched onto the six-point scale. Ties round
//! toward the worse label.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::indices::{AirCategory, WaterCategory};

/// Number of overall labels (and classifier classes).
pub const NUM_LABELS: usize = 6;

/// Six-level overall environment label, rank 1 (best) through 6 (worst).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EnvLabel {
    Good,
    Satisfactory,
    Fair,
    Poor,
    Bad,
    Severe,
}

impl EnvLabel {
    pub const ALL: [EnvLabel; NUM_LABELS] = [
        EnvLabel::Good,
        EnvLabel::Satisfactory,
        EnvLabel::Fair,
        EnvLabel::Poor,
        EnvLabel::Bad,
        EnvLabel::Severe,
    ];

    /// Numeric rank: Good=1 … Severe=6.
    pub fn rank(self) -> u8 {
        self as u8 + 1
    }

    /// Zero-based class index used by the classifiers.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_rank(rank: u8) -> Option<EnvLabel> {
        match rank {
            1..=6 => Some(EnvLabel::ALL[rank as usize - 1]),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvLabel::Good => "Good",
            EnvLabel::Satisfactory => "Satisfactory",
            EnvLabel::Fair => "Fair",
            EnvLabel::Poor => "Poor",
            EnvLabel::Bad => "Bad",
            EnvLabel::Severe => "Severe",
        }
    }
}

impl fmt::Display for EnvLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        EnvLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown label `{s}`")))
    }
}

/// Numeric rank of a label, 1..=6.
pub fn label_rank(label: EnvLabel) -> u8 {
    label.rank()
}

/// Whether a cell comes from the pinned rules or the fill formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Pinned,
    Derived,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Pinned => "pinned",
            Provenance::Derived => "derived",
        }
    }
}

/// An adjacent pair of cells where worsening one input improves the label.
/// These can only be forced by pinned cells; the self-check lists them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub from: (AirCategory, WaterCategory),
    pub to: (AirCategory, WaterCategory),
}

impl fmt::Display for MonotonicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "label improves from ({}, {}) to ({}, {})",
            self.from.0, self.from.1, self.to.0, self.to.1
        )
    }
}

/// Total 6×5 map from (air, water) categories to overall labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    cells: [[(EnvLabel, Provenance); 5]; 6],
}

/// Cells fixed by the labeling rules: the air-Good row (water Excellent
/// collapses to Good since the output scale has no Excellent) and every
/// pair where both scales use the same name.
const PINNED: [(AirCategory, WaterCategory, EnvLabel); 8] = [
    (AirCategory::Good, WaterCategory::Excellent, EnvLabel::Good),
    (AirCategory::Good, WaterCategory::Good, EnvLabel::Good),
    (AirCategory::Good, WaterCategory::Satisfactory, EnvLabel::Good),
    (AirCategory::Good, WaterCategory::Poor, EnvLabel::Fair),
    (AirCategory::Good, WaterCategory::Severe, EnvLabel::Bad),
    (AirCategory::Satisfactory, WaterCategory::Satisfactory, EnvLabel::Satisfactory),
    (AirCategory::Poor, WaterCategory::Poor, EnvLabel::Poor),
    (AirCategory::Severe, WaterCategory::Severe, EnvLabel::Severe),
];

/// Fill formula: score = 0.6·a + 0.4·(1 + 1.25·(w − 1)) with a the air
/// rank (1–6) and w the water rank (1–5), rounded half-up and clamped to
/// 1..=6. Ten times the score is the integer 6a + 5w − 1, so the rounded
/// rank is computed exactly as (6a + 5w + 4) / 10.
fn fill_rank(air_rank: u8, water_rank: u8) -> u8 {
    let scaled = 6 * air_rank as u16 + 5 * water_rank as u16 + 4;
    (scaled / 10).clamp(1, 6) as u8
}

impl LabelTable {
    fn build() -> LabelTable {
        let mut cells = [[(EnvLabel::Good, Provenance::Derived); 5]; 6];
        for air in AirCategory::ALL {
            for water in WaterCategory::ALL {
                let rank = fill_rank(air.rank(), water.rank());
                cells[air as usize][water as usize] =
                    (EnvLabel::from_rank(rank).unwrap(), Provenance::Derived);
            }
        }
        for (air, water, label) in PINNED {
            cells[air as usize][water as usize] = (label, Provenance::Pinned);
        }
        LabelTable { cells }
    }

    pub fn get(&self, air: AirCategory, water: WaterCategory) -> EnvLabel {
        self.cells[air as usize][water as usize].0
    }

    pub fn provenance(&self, air: AirCategory, water: WaterCategory) -> Provenance {
        self.cells[air as usize][water as usize].1
    }

    /// Lists every adjacent cell pair that breaks rank monotonicity.
    pub fn monotonicity_violations(&self) -> Vec<MonotonicityViolation> {
        let mut violations = Vec::new();
        for water in WaterCategory::ALL {
            for pair in AirCategory::ALL.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                if self.get(b, water).rank() < self.get(a, water).rank() {
                    violations.push(MonotonicityViolation {
                        from: (a, water),
                        to: (b, water),
                    });
                }
            }
        }
        for air in AirCategory::ALL {
            for pair in WaterCategory::ALL.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                if self.get(air, b).rank() < self.get(air, a).rank() {
                    violations.push(MonotonicityViolation {
                        from: (air, a),
                        to: (air, b),
                    });
                }
            }
        }
        violations
    }
}

/// Builds the full rule table.
pub fn build_label_table() -> LabelTable {
    LabelTable::build()
}

/// The shared, lazily built rule table.
pub fn label_table() -> &'static LabelTable {
    static TABLE: OnceLock<LabelTable> = OnceLock::new();
    TABLE.get_or_init(LabelTable::build)
}

/// Overall label for one (air, water) category pair.
pub fn combine(air: AirCategory, water: WaterCategory) -> EnvLabel {
    label_table().get(air, water)
}
