use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Part temperature alarm threshold, in °C.
pub const PT_THRESHOLD: f64 = 600.0;

/// Default part-height nominal ("current layer"), constant over a level.
pub const DEFAULT_LAYER_HEIGHT_MM: f64 = 30.0;

/// One of the monitored process quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Criterion {
    WpdWidth,
    WpdHeight,
    Ph,
    Wpt,
    Pt,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::WpdWidth,
        Criterion::WpdHeight,
        Criterion::Ph,
        Criterion::Wpt,
        Criterion::Pt,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Key used in line-delimited frame logs.
    pub fn log_key(self) -> &'static str {
        match self {
            Criterion::WpdWidth => "wpd_w",
            Criterion::WpdHeight => "wpd_h",
            Criterion::Ph => "ph",
            Criterion::Wpt => "wpt",
            Criterion::Pt => "pt",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::WpdWidth => "WPD_WIDTH",
            Criterion::WpdHeight => "WPD_HEIGHT",
            Criterion::Ph => "PH",
            Criterion::Wpt => "WPT",
            Criterion::Pt => "PT",
        }
    }

    pub fn group(self) -> CriterionGroup {
        match self {
            Criterion::WpdWidth | Criterion::WpdHeight => CriterionGroup::Wpd,
            Criterion::Ph => CriterionGroup::Ph,
            Criterion::Wpt => CriterionGroup::Wpt,
            Criterion::Pt => CriterionGroup::Pt,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s) || c.log_key() == s)
            .ok_or_else(|| format!("unknown criterion `{s}`"))
    }
}

/// The four criterion groups; each ecology dedicates one stimulus to each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionGroup {
    Wpd,
    Ph,
    Wpt,
    Pt,
}

impl CriterionGroup {
    pub const ALL: [CriterionGroup; 4] = [
        CriterionGroup::Wpd,
        CriterionGroup::Ph,
        CriterionGroup::Wpt,
        CriterionGroup::Pt,
    ];

    pub fn members(self) -> &'static [Criterion] {
        match self {
            CriterionGroup::Wpd => &[Criterion::WpdWidth, Criterion::WpdHeight],
            CriterionGroup::Ph => &[Criterion::Ph],
            CriterionGroup::Wpt => &[Criterion::Wpt],
            CriterionGroup::Pt => &[Criterion::Pt],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionKind {
    /// In tolerance while `|value - nominal| <= tol_halfwidth`.
    Band,
    /// Alarm once `value >= nominal`.
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub id: Criterion,
    pub nominal: f64,
    pub tol_halfwidth: f64,
    pub kind: CriterionKind,
}

impl CriterionSpec {
    pub fn band(id: Criterion, nominal: f64, tol_halfwidth: f64) -> Self {
        Self {
            id,
            nominal,
            tol_halfwidth,
            kind: CriterionKind::Band,
        }
    }

    /// Signed deviation in units of the tolerance half-width.
    ///
    /// Threshold criteria have no band; they report 0.
    pub fn normalized(&self, value: f64) -> f64 {
        match self.kind {
            CriterionKind::Band => (value - self.nominal) / self.tol_halfwidth,
            CriterionKind::Threshold => 0.0,
        }
    }

    pub fn out_of_tolerance(&self, value: f64) -> bool {
        match self.kind {
            CriterionKind::Band => (value - self.nominal).abs() > self.tol_halfwidth,
            CriterionKind::Threshold => value >= self.nominal,
        }
    }
}

/// Nominal values and tolerances for all five criteria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRegistry {
    specs: [CriterionSpec; 5],
}

impl CriterionRegistry {
    pub fn with_layer_height(layer_mm: f64) -> Self {
        Self {
            specs: [
                CriterionSpec::band(Criterion::WpdWidth, 4.0, 0.4),
                CriterionSpec::band(Criterion::WpdHeight, 3.0, 0.3),
                CriterionSpec::band(Criterion::Ph, layer_mm, 1.5),
                CriterionSpec::band(Criterion::Wpt, 2000.0, 200.0),
                CriterionSpec {
                    id: Criterion::Pt,
                    nominal: PT_THRESHOLD,
                    tol_halfwidth: 0.0,
                    kind: CriterionKind::Threshold,
                },
            ],
        }
    }

    pub fn get(&self, c: Criterion) -> &CriterionSpec {
        &self.specs[c.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &CriterionSpec> {
        self.specs.iter()
    }
}

impl Default for CriterionRegistry {
    fn default() -> Self {
        Self::with_layer_height(DEFAULT_LAYER_HEIGHT_MM)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_matches_table() {
        let r = CriterionRegistry::default();
        let w = r.get(Criterion::WpdWidth);
        assert_eq!((w.nominal, w.tol_halfwidth), (4.0, 0.4));
        let h = r.get(Criterion::WpdHeight);
        assert_eq!((h.nominal, h.tol_halfwidth), (3.0, 0.3));
        assert_eq!(r.get(Criterion::Ph).tol_halfwidth, 1.5);
        let t = r.get(Criterion::Wpt);
        assert_eq!((t.nominal, t.tol_halfwidth), (2000.0, 200.0));
        assert_eq!(r.get(Criterion::Pt).kind, CriterionKind::Threshold);
        assert_eq!(r.get(Criterion::Pt).nominal, 600.0);
        for spec in r.iter() {
            if spec.kind == CriterionKind::Band {
                assert!(spec.tol_halfwidth > 0.0);
            } else {
                assert_eq!(spec.id, Criterion::Pt);
            }
        }
    }

    #[test]
    fn criterion_names_round_trip() {
        for c in Criterion::ALL {
            assert_eq!(c.as_str().parse::<Criterion>().unwrap(), c);
            assert_eq!(c.log_key().parse::<Criterion>().unwrap(), c);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.as_str()));
        }
    }
}
