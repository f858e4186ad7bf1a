use serde::{Deserialize, Serialize};

use crate::error::{GmtError, Result};

/// Slack used when validating symmetry and triangle inequality of a loaded
/// distance table. Tables are rejected when they violate the axioms by more
/// than this relative to the largest entry.
const TABLE_AXIOM_SLACK: f64 = 1e-12;

/// A finite metric space given by labels and a full distance table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FiniteSpaceRaw", into = "FiniteSpaceRaw")]
pub struct FiniteSpace {
    labels: Vec<String>,
    /// Row-major n*n table, validated on construction.
    table: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FiniteSpaceRaw {
    labels: Vec<String>,
    distances: Vec<Vec<f64>>,
}

impl From<FiniteSpace> for FiniteSpaceRaw {
    fn from(space: FiniteSpace) -> Self {
        let n = space.labels.len();
        let distances = (0..n)
            .map(|i| space.table[i * n..(i + 1) * n].to_vec())
            .collect();
        FiniteSpaceRaw { labels: space.labels, distances }
    }
}

impl TryFrom<FiniteSpaceRaw> for FiniteSpace {
    type Error = GmtError;

    fn try_from(raw: FiniteSpaceRaw) -> Result<Self> {
        FiniteSpace::new(raw.labels, raw.distances)
    }
}

impl FiniteSpace {
    pub fn new(labels: Vec<String>, distances: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(GmtError::Invalid("finite space needs at least one label".into()));
        }
        let mut seen = labels.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(GmtError::Invalid("labels must be distinct".into()));
        }
        if distances.len() != n || distances.iter().any(|row| row.len() != n) {
            return Err(GmtError::Invalid(format!(
                "distance table must be {n}x{n} to match the labels"
            )));
        }
        let mut table = Vec::with_capacity(n * n);
        for row in &distances {
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(GmtError::Invalid(format!("distance entries must be finite and nonnegative, got {v}")));
                }
                table.push(v);
            }
        }
        let scale = table.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
        let tol = TABLE_AXIOM_SLACK * scale;
        for i in 0..n {
            if table[i * n + i] != 0.0 {
                return Err(GmtError::Invalid(format!("diagonal entry ({i},{i}) must be 0")));
            }
            for j in 0..n {
                if (table[i * n + j] - table[j * n + i]).abs() > tol {
                    return Err(GmtError::Invalid(format!("table is asymmetric at ({i},{j})")));
                }
                if i != j && table[i * n + j] <= 0.0 {
                    return Err(GmtError::Invalid(format!(
                        "distinct labels {i},{j} must have positive distance"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[i * n + k] > table[i * n + j] + table[j * n + k] + tol {
                        return Err(GmtError::Invalid(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteSpace { labels, table })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: FiniteSpaceRaw = serde_json::from_str(s)?;
        FiniteSpace::new(raw.labels, raw.distances)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        FiniteSpace::from_json_str(&text)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        if i >= n {
            return Err(GmtError::UnknownLabel(i));
        }
        if j >= n {
            return Err(GmtError::UnknownLabel(j));
        }
        Ok(self.table[i * n + j])
    }

    /// Label indices inside the ball around `center`.
    pub fn ball_members(&self, center: usize, radius: f64, closed: bool) -> Result<Vec<usize>> {
        if center >= self.len() {
            return Err(GmtError::UnknownLabel(center));
        }
        Ok((0..self.len())
            .filter(|&j| {
                let d = self.table[center * self.len() + j];
                if closed {
                    d <= radius
                } else {
                    d < radius
                }
            })
            .collect())
    }

    /// Largest pairwise distance within a set of label indices.
    pub fn subset_diameter(&self, members: &[usize]) -> Result<f64> {
        if members.is_empty() {
            return Err(GmtError::EmptySet);
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= self.len()) {
            return Err(GmtError::UnknownLabel(bad));
        }
        let mut best = 0.0_f64;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                best = best.max(self.distance(i, j)?);
            }
        }
        Ok(best)
    }

    /// Smallest positive pairwise distance, if the space has more than one point.
    pub fn min_positive_distance(&self) -> Option<f64> {
        let n = self.len();
        let mut best: Option<f64> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.table[i * n + j];
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best
    }
}
