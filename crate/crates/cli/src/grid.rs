use std::fmt;
use std::str::FromStr;

/// Points past this are almost certainly a typo in `--grid`.
const MAX_POINTS: usize = 10_000_000;

pub const DEFAULT_POINTS: usize = 400;

/// An explicit `start:stop:step` noise grid, stop inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("expected start:stop:step, got `{s}`"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(String::from("grid bounds must be finite"));
        }
        if start < 0.0 || stop < start {
            return Err(format!("need 0 <= start <= stop, got {start}:{stop}"));
        }
        if step <= 0.0 {
            return Err(format!("step must be positive, got {step}"));
        }
        if (stop - start) / step >= MAX_POINTS as f64 {
            return Err(format!("grid has more than {MAX_POINTS} points"));
        }
        Ok(GridSpec { start, stop, step })
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// The noise values to evaluate and a one-line description for manifests.
#[derive(Debug, Clone)]
pub struct Grid {
    pub points: Vec<f64>,
    pub description: String,
}

impl Grid {
    /// `DEFAULT_POINTS` uniform points on `[0, limit)`, or on `[0, limit]`
    /// when `inclusive`.
    pub fn uniform(limit: f64, inclusive: bool) -> Self {
        let n = DEFAULT_POINTS;
        let denom = if inclusive { (n - 1) as f64 } else { n as f64 };
        let points = (0..n).map(|i| limit * i as f64 / denom).collect();
        let close = if inclusive { ']' } else { ')' };
        Grid { points, description: format!("{n} uniform points on [0, {limit}{close}") }
    }

    pub fn resolve(spec: Option<GridSpec>, limit: f64, inclusive: bool) -> Self {
        match spec {
            Some(g) => Grid { points: g.points(), description: format!("{g}") },
            None => Self::uniform(limit, inclusive),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_expand() {
        let g: GridSpec = "0:0.1:0.025".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 5);
        assert!((p[4] - 0.1).abs() < 1e-15);
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!("0:1:0".parse::<GridSpec>().is_err());
        assert!("0.5:0.1:0.1".parse::<GridSpec>().is_err());
        assert!("a:1:0.1".parse::<GridSpec>().is_err());
    }

    #[test]
    fn default_grid() {
        let g = Grid::uniform(0.5, false);
        assert_eq!(g.points.len(), 400);
        assert_eq!(g.points[0], 0.0);
        assert!(*g.points.last().unwrap() < 0.5);
        let g = Grid::uniform(0.5, true);
        assert_eq!(*g.points.last().unwrap(), 0.5);
    }
}
