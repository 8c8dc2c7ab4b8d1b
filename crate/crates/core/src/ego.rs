//! Ego citation environments.
//!
//! An environment holds the ego journal plus every journal whose citation
//! exchange with the ego reaches a fixed share of the ego's total in one
//! dimension, together with the full citation matrix among those members.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::CitationTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Journals that cite the ego.
    Cited,
    /// Journals the ego cites.
    Citing,
}

/// Member selection: one direction, or the experimental union of both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Cited,
    Citing,
    Both,
}

impl From<Direction> for Dimension {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Cited => Dimension::Cited,
            Direction::Citing => Dimension::Citing,
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cited" => Ok(Dimension::Cited),
            "citing" => Ok(Dimension::Citing),
            "both" => Ok(Dimension::Both),
            _ => Err(Error::Parameter(format!("direction must be cited, citing or both, got {s:?}"))),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Cited => "cited",
            Dimension::Citing => "citing",
            Dimension::Both => "both",
        })
    }
}

/// Selection threshold as an exact fraction `num / den` in (0, 1].
///
/// Membership tests compare `edge * den >= num * total` in integer
/// arithmetic, so a journal at exactly 1% is never lost to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Threshold {
    num: u64,
    den: u64,
}

impl Threshold {
    pub const ONE_PERCENT: Threshold = Threshold { num: 1, den: 100 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::Parameter(format!("threshold {num}/{den} is not in (0, 1]")));
        }
        let g = gcd(num, den);
        Ok(Self { num: num / g, den: den / g })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `edge >= threshold * total`, exactly.
    pub fn admits(&self, edge: u64, total: u64) -> bool {
        edge as u128 * self.den as u128 >= self.num as u128 * total as u128
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Self::ONE_PERCENT
    }
}

/// Parses a decimal such as `0.01` or `1e-2` exactly, or a ratio `1/100`.
impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("cannot parse threshold {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return Threshold::new(n, d);
        }
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: u128 = digits.parse().map_err(|_| bad())?;
        let mut scale = frac_part.len() as i32 - exp;
        let mut den: u128 = 1;
        while scale > 0 {
            den = den.checked_mul(10).ok_or_else(bad)?;
            scale -= 1;
        }
        while scale < 0 {
            num = num.checked_mul(10).ok_or_else(bad)?;
            scale += 1;
        }
        let g = gcd128(num.max(1), den);
        let (num, den) = (num / g, den / g);
        Threshold::new(u64::try_from(num).map_err(|_| bad())?, u64::try_from(den).map_err(|_| bad())?)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn gcd128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd128(b, a % b)
    }
}

/// Square count matrix, rows citing and columns cited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    n: usize,
    data: Vec<u64>,
}

impl CountMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, citing: usize, cited: usize) -> u64 {
        self.data[citing * self.n + cited]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EgoEnvironment {
    pub ego: String,
    pub year: i32,
    pub dimension: Dimension,
    pub threshold: Threshold,
    /// Ego first, then the remaining members in lexicographic order.
    pub members: Vec<String>,
    pub matrix: CountMatrix,
}

impl EgoEnvironment {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn edge(tensor: &CitationTensor, ego: &str, other: &str, year: i32, direction: Direction) -> u64 {
    match direction {
        Direction::Citing => tensor.count(year, ego, other),
        Direction::Cited => tensor.count(year, other, ego),
    }
}

/// Total citations of the ego in one direction, self-citations included.
pub fn ego_total(tensor: &CitationTensor, ego: &str, year: i32, direction: Direction) -> u64 {
    match direction {
        Direction::Citing => tensor.row(year, ego).map(|(_, c)| c).sum(),
        Direction::Cited => tensor.column(year, ego).map(|(_, c)| c).sum(),
    }
}

/// Journals whose exchange with the ego reaches `threshold` of the ego total.
/// The ego always comes first; the rest are sorted.
pub fn select_members(
    tensor: &CitationTensor,
    ego: &str,
    year: i32,
    direction: Direction,
    threshold: Threshold,
) -> Result<Vec<String>> {
    let total = ego_total(tensor, ego, year, direction);
    if total == 0 {
        return Err(Error::EmptyEnvironment(format!(
            "{ego} has no {} citations in {year}",
            match direction {
                Direction::Citing => "outgoing",
                Direction::Cited => "incoming",
            }
        )));
    }
    let candidates: Vec<&str> = match direction {
        Direction::Citing => tensor.row(year, ego).map(|(j, _)| j).collect(),
        Direction::Cited => tensor.column(year, ego).map(|(j, _)| j).collect(),
    };
    let mut members = vec![ego.to_string()];
    // row/column views are already name-ordered
    members.extend(
        candidates
            .into_iter()
            .filter(|&j| j != ego && threshold.admits(edge(tensor, ego, j, year, direction), total))
            .map(str::to_string),
    );
    Ok(members)
}

/// Union of the cited and citing member sets. Errors only when the ego has
/// no citations in either direction.
pub fn select_members_union(
    tensor: &CitationTensor,
    ego: &str,
    year: i32,
    threshold: Threshold,
) -> Result<Vec<String>> {
    let cited = select_members(tensor, ego, year, Direction::Cited, threshold);
    let citing = select_members(tensor, ego, year, Direction::Citing, threshold);
    let mut rest: Vec<String> = match (cited, citing) {
        (Err(e), Err(_)) => return Err(e),
        (a, b) => a.into_iter().chain(b).flatten().filter(|j| j != ego).collect(),
    };
    rest.sort();
    rest.dedup();
    let mut members = vec![ego.to_string()];
    members.extend(rest);
    Ok(members)
}

/// Citation counts among `members` for one year. The whole square is filled
/// in, diagonal included, whatever dimension picked the members.
pub fn build_matrix(tensor: &CitationTensor, members: &[String], year: i32) -> CountMatrix {
    let n = members.len();
    let mut data = Vec::with_capacity(n * n);
    for citing in members {
        for cited in members {
            data.push(tensor.count(year, citing, cited));
        }
    }
    CountMatrix { n, data }
}

/// Member selection followed by matrix construction.
pub fn ego_environment(
    tensor: &CitationTensor,
    ego: &str,
    year: i32,
    dimension: Dimension,
    threshold: Threshold,
) -> Result<EgoEnvironment> {
    let members = match dimension {
        Dimension::Citing => select_members(tensor, ego, year, Direction::Citing, threshold)?,
        Dimension::Cited => select_members(tensor, ego, year, Direction::Cited, threshold)?,
        Dimension::Both => select_members_union(tensor, ego, year, threshold)?,
    };
    let matrix = build_matrix(tensor, &members, year);
    Ok(EgoEnvironment { ego: ego.to_string(), year, dimension, threshold, members, matrix })
}
