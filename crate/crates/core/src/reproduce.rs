//! The published tables and scalars as CSV reports.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::models::{BernoulliBetaModel, LocationNormalModel, LocationScaleModel};

/// A cell of a report: parameters are printed as given, values honour `--digits`.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Text(String),
    Param(f64),
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

/// Rounds to `digits` decimals, ties to even on the exact binary value.
pub fn round_half_even(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    // "-0.00" reads as a sign flip in a table
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

impl Report {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Header row then one line per row, comma separated, LF terminated.
    pub fn to_csv(&self, digits: Option<usize>) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|f| match (f, digits) {
                    (Field::Text(s), _) => s.clone(),
                    (Field::Param(v), _) => format!("{v}"),
                    (Field::Value(v), Some(k)) => round_half_even(*v, k),
                    (Field::Value(v), None) => format!("{v}"),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// The value column of the row whose leading parameters equal `key`.
    pub fn lookup(&self, key: &[f64]) -> Option<f64> {
        self.rows.iter().find_map(|r| {
            let params: Vec<f64> = r
                .iter()
                .filter_map(|f| if let Field::Param(v) = f { Some(*v) } else { None })
                .collect();
            if params.len() >= key.len() && params[..key.len()] == *key {
                r.iter().rev().find_map(|f| if let Field::Value(v) = f { Some(*v) } else { None })
            } else {
                None
            }
        })
    }

    /// The value of a (name, value) row.
    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.rows.iter().find_map(|r| match r.as_slice() {
            [Field::Text(n), Field::Value(v)] if n == name => Some(*v),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReproId {
    Table(u8),
    Scalars1A,
    Scalars1B,
    Scalars2A,
    Scalars2B,
    Scalars3A,
    Scalars3B,
    Scalars3C,
    Scalars3D,
}

impl ReproId {
    pub fn all() -> Vec<ReproId> {
        use ReproId::*;
        let mut v: Vec<ReproId> = (1..=9).map(Table).collect();
        v.extend([Scalars1A, Scalars1B, Scalars2A, Scalars2B, Scalars3A, Scalars3B, Scalars3C, Scalars3D]);
        v
    }
}

impl fmt::Display for ReproId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ReproId::*;
        match self {
            Table(k) => write!(f, "table{k}"),
            Scalars1A => f.write_str("scalars1a"),
            Scalars1B => f.write_str("scalars1b"),
            Scalars2A => f.write_str("scalars2a"),
            Scalars2B => f.write_str("scalars2b"),
            Scalars3A => f.write_str("scalars3a"),
            Scalars3B => f.write_str("scalars3b"),
            Scalars3C => f.write_str("scalars3c"),
            Scalars3D => f.write_str("scalars3d"),
        }
    }
}

impl FromStr for ReproId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReproId::all()
            .into_iter()
            .find(|id| id.to_string() == s)
            .ok_or_else(|| Error::UnknownItem(s.to_string()))
    }
}

const N: u64 = 20;

pub fn example1_no_conflict() -> LocationNormalModel {
    LocationNormalModel::new(N, 0.2591, 0.5, 1.0).expect("valid constants")
}

pub fn example1_conflict() -> LocationNormalModel {
    LocationNormalModel::new(N, 4.0867, 0.5, 1.0).expect("valid constants")
}

pub fn example2_no_conflict() -> BernoulliBetaModel {
    BernoulliBetaModel::new(N, 3, 5.0, 20.0).expect("valid constants")
}

pub fn example2_conflict() -> BernoulliBetaModel {
    BernoulliBetaModel::new(N, 17, 5.0, 20.0).expect("valid constants")
}

fn ls(xbar: f64, s_sq: f64) -> LocationScaleModel {
    LocationScaleModel::new(N, xbar, s_sq, 0.0, 1.0, 5.0, 5.0).expect("valid constants")
}

/// Sample from N(0, 1): no conflict with either prior.
pub fn example3_a() -> LocationScaleModel {
    ls(-0.1066, 0.9087)
}

/// Sample from N(0, 25): conflict with the prior on sigma^2.
pub fn example3_b() -> LocationScaleModel {
    ls(0.0950, 23.9593)
}

/// Sample from N(10, 1) as quoted for the check on sigma^2.
pub fn example3_c() -> LocationScaleModel {
    ls(9.7041, 1.0082)
}

/// Sample from N(10, 1) as quoted for the check on mu.
pub fn example3_d() -> LocationScaleModel {
    ls(9.7941, 1.0082)
}

pub const NORMAL_DIRECTIONS: [(f64, f64); 12] = [
    (-3.0, 1.0),
    (-2.0, 1.0),
    (-1.0, 1.0),
    (1.0, 1.0),
    (2.0, 1.0),
    (3.0, 1.0),
    (0.5, 0.5),
    (0.5, 1.0),
    (0.5, 2.0),
    (0.5, 3.0),
    (0.5, 50.0),
    (0.5, 100.0),
];

pub const BETA_DIRECTIONS: [(f64, f64); 10] = [
    (20.0, 5.0),
    (15.0, 5.0),
    (10.0, 5.0),
    (5.0, 5.0),
    (1.0, 5.0),
    (5.0, 1.0),
    (5.0, 25.0),
    (5.0, 22.0),
    (5.0, 20.0),
    (5.0, 16.0),
];

pub const GAMMA_DIRECTIONS: [(f64, f64); 8] = [
    (5.0, 1.0),
    (5.0, 2.0),
    (5.0, 4.0),
    (5.0, 10.0),
    (1.0, 5.0),
    (2.0, 5.0),
    (4.0, 5.0),
    (10.0, 5.0),
];

/// (mu1, tau1^2 as labelled). The conditional prior in direction (mu1, t) is
/// N(mu1, t^2 sigma^2): the labelled value enters squared.
pub const MU_DIRECTIONS: [(f64, f64); 8] = [
    (-2.0, 1.0),
    (-1.0, 1.0),
    (1.0, 1.0),
    (2.0, 1.0),
    (0.0, 2.0),
    (0.0, 3.0),
    (0.0, 4.0),
    (0.0, 5.0),
];

pub fn tau1_sq_used(label: f64) -> f64 {
    label * label
}

fn scalars(pairs: Vec<(&str, f64)>) -> Report {
    let mut r = Report::new(&["name", "value"]);
    for (n, v) in pairs {
        r.rows.push(vec![Field::Text(n.to_string()), Field::Value(v)]);
    }
    r
}

fn location_scale_scalars(m: &LocationScaleModel) -> Result<Report> {
    Ok(scalars(vec![
        ("tail_sigma_sq", m.tail_pi1()?),
        ("rb1_max", m.rb1_s2_max()),
        ("tail_mu", m.tail_pi2()?),
        ("integrated_worst_case", m.integrated_worst_case()),
    ]))
}

pub fn reproduce(id: ReproId) -> Result<Report> {
    use ReproId::*;
    match id {
        Table(k @ (1 | 2)) => {
            let m = if k == 1 { example1_no_conflict() } else { example1_conflict() };
            let mut r = Report::new(&["mu1", "sigma1_sq", "ratio"]);
            for (mu1, s1) in NORMAL_DIRECTIONS {
                r.rows.push(vec![Field::Param(mu1), Field::Param(s1), Field::Value(m.ratio_direction(mu1, s1)?)]);
            }
            Ok(r)
        }
        Table(3) => {
            let m = example2_conflict();
            let mut r = Report::new(&["alpha1", "beta1", "ratio"]);
            for (a, b) in BETA_DIRECTIONS {
                r.rows.push(vec![Field::Param(a), Field::Param(b), Field::Value(m.beta_ratio_direction(a, b)?)]);
            }
            Ok(r)
        }
        Table(k @ (4..=6)) => {
            let m = [example3_a(), example3_b(), example3_c()][k as usize - 4];
            let mut r = Report::new(&["alpha1", "beta1", "ratio"]);
            for (a, b) in GAMMA_DIRECTIONS {
                r.rows.push(vec![Field::Param(a), Field::Param(b), Field::Value(m.s2_predictive_ratio(a, b)?)]);
            }
            Ok(r)
        }
        Table(k @ (7..=9)) => {
            let m = [example3_a(), example3_b(), example3_d()][k as usize - 7];
            let mut r = Report::new(&["mu1", "tau1_sq_label", "tau1_sq_used", "ratio"]);
            for (mu1, label) in MU_DIRECTIONS {
                let used = tau1_sq_used(label);
                r.rows.push(vec![
                    Field::Param(mu1),
                    Field::Param(label),
                    Field::Param(used),
                    Field::Value(m.xbar_cond_predictive_ratio(mu1, used)?),
                ]);
            }
            Ok(r)
        }
        Table(k) => Err(Error::UnknownItem(format!("table{k}"))),
        Scalars1A | Scalars1B => {
            let m = if id == Scalars1A { example1_no_conflict() } else { example1_conflict() };
            Ok(scalars(vec![("tail", m.tail_probability()?), ("sup_ratio", m.sup_ratio())]))
        }
        Scalars2A | Scalars2B => {
            let m = if id == Scalars2A { example2_no_conflict() } else { example2_conflict() };
            Ok(scalars(vec![("tail", m.tail_probability()?), ("sup_ratio", m.sup_ratio())]))
        }
        Scalars3A => location_scale_scalars(&example3_a()),
        Scalars3B => location_scale_scalars(&example3_b()),
        Scalars3C => location_scale_scalars(&example3_c()),
        Scalars3D => location_scale_scalars(&example3_d()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ReproId::all() {
            assert_eq!(id.to_string().parse::<ReproId>().unwrap(), id);
        }
        assert!("table10".parse::<ReproId>().is_err());
        assert_eq!(ReproId::all().len(), 17);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_even(0.125, 2), "0.12");
        assert_eq!(round_half_even(0.375, 2), "0.38");
        assert_eq!(round_half_even(-0.0001, 2), "0.00");
        assert_eq!(round_half_even(2.5, 0), "2");
    }

    #[test]
    fn csv_layout() {
        let r = reproduce(ReproId::Table(1)).unwrap();
        let csv = r.to_csv(Some(4));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("mu1,sigma1_sq,ratio"));
        assert_eq!(lines.next(), Some("-3,1,0.0065"));
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
        assert_eq!(csv.lines().count(), 13);
        assert_eq!(r.lookup(&[0.5, 1.0]), Some(1.0));
    }

    #[test]
    fn every_id_produces_finite_values() {
        for id in ReproId::all() {
            let r = reproduce(id).unwrap();
            for row in &r.rows {
                assert_eq!(row.len(), r.header.len());
                for f in row {
                    if let Field::Value(v) = f {
                        assert!(v.is_finite(), "{id}");
                    }
                }
            }
        }
    }
}
