use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_semi_infinite_with, EndpointHints, QuadratureConfig};

/// Shape of the radial curvature bound `G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `G = 0`: Euclidean space.
    Zero,
    /// `G = a` on `[0, t_cut]`, continued as `a (t_cut / t)^4`. An infinite
    /// cut gives the constant profile, whose moment diverges.
    ConstantCutoff { a: f64, t_cut: f64 },
    /// `G = 2 b0 / (1 + t^2)^2`, with moment exactly `b0`.
    RationalDecay { b0: f64 },
    /// Piecewise-linear through `(grid, values)`, constant before the first
    /// node and `G_last (t_last / t)^tail_power` after the last.
    Tabulated {
        grid: Vec<f64>,
        values: Vec<f64>,
        tail_power: f64,
    },
}

/// Radial curvature bound `G >= 0` together with its cached moment
/// `b = int_0^inf t G(t) dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    kind: ProfileKind,
    b: f64,
}

/// Tail power a tabulated profile must exceed so that `b` is finite.
pub const MIN_TAIL_POWER: f64 = 2.0;

impl CurvatureProfile {
    pub fn zero() -> Self {
        Self {
            kind: ProfileKind::Zero,
            b: 0.0,
        }
    }

    pub fn constant_cutoff(a: f64, t_cut: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Profile(format!(
                "constant level must be finite and >= 0, got {a}"
            )));
        }
        if !(t_cut > 0.0) {
            return Err(Error::Profile(format!(
                "cutoff must be positive, got {t_cut}"
            )));
        }
        let b = if a == 0.0 { 0.0 } else { a * t_cut * t_cut };
        Ok(Self {
            kind: ProfileKind::ConstantCutoff { a, t_cut },
            b,
        })
    }

    pub fn rational_decay(b0: f64) -> Result<Self> {
        if !(b0 >= 0.0) || !b0.is_finite() {
            return Err(Error::Profile(format!(
                "b0 must be finite and >= 0, got {b0}"
            )));
        }
        Ok(Self {
            kind: ProfileKind::RationalDecay { b0 },
            b: b0,
        })
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>, tail_power: f64) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::Profile(
                "table needs at least two (t, G) rows of matching length".into(),
            ));
        }
        if !(grid[0] >= 0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Profile(
                "table abscissae must be >= 0 and strictly increasing".into(),
            ));
        }
        if values.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::Profile(
                "table values must be finite and >= 0".into(),
            ));
        }
        if !(tail_power > MIN_TAIL_POWER) || !tail_power.is_finite() {
            return Err(Error::Profile(format!(
                "tail_power must exceed {MIN_TAIL_POWER} for a finite moment, got {tail_power}"
            )));
        }
        let mut profile = Self {
            kind: ProfileKind::Tabulated {
                grid,
                values,
                tail_power,
            },
            b: 0.0,
        };
        profile.b = profile.moment_beyond(0.0);
        Ok(profile)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Cached moment `b`; `+inf` for negative controls.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `true` when the integrability hypothesis `b < inf` fails.
    pub fn is_negative_control(&self) -> bool {
        !self.b.is_finite()
    }

    pub fn g(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Zero => 0.0,
            ProfileKind::ConstantCutoff { a, t_cut } => {
                if t <= *t_cut {
                    *a
                } else {
                    a * (t_cut / t).powi(4)
                }
            }
            ProfileKind::RationalDecay { b0 } => 2.0 * b0 / (1.0 + t * t).powi(2),
            ProfileKind::Tabulated {
                grid,
                values,
                tail_power,
            } => {
                let last = grid.len() - 1;
                if t <= grid[0] {
                    values[0]
                } else if t >= grid[last] {
                    values[last] * (grid[last] / t).powf(*tail_power)
                } else {
                    let i = grid.partition_point(|x| *x <= t) - 1;
                    let s = (t - grid[i]) / (grid[i + 1] - grid[i]);
                    values[i] + s * (values[i + 1] - values[i])
                }
            }
        }
    }

    /// Power `d` with `G(t) ~ t^-d` at infinity, if `G` decays.
    pub fn decay_power(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::Zero => None,
            ProfileKind::ConstantCutoff { t_cut, .. } if t_cut.is_finite() => Some(4.0),
            ProfileKind::ConstantCutoff { .. } => None,
            ProfileKind::RationalDecay { .. } => Some(4.0),
            ProfileKind::Tabulated { tail_power, .. } => Some(*tail_power),
        }
    }

    /// Closed-form `int_t^inf s G(s) ds`.
    pub fn moment_beyond(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match &self.kind {
            ProfileKind::Zero => 0.0,
            ProfileKind::ConstantCutoff { a, t_cut } => {
                if *a == 0.0 {
                    0.0
                } else if !t_cut.is_finite() {
                    f64::INFINITY
                } else if t <= *t_cut {
                    a * (t_cut * t_cut - 0.5 * t * t)
                } else {
                    0.5 * a * t_cut.powi(4) / (t * t)
                }
            }
            ProfileKind::RationalDecay { b0 } => b0 / (1.0 + t * t),
            ProfileKind::Tabulated {
                grid,
                values,
                tail_power,
            } => {
                let last = grid.len() - 1;
                let (tl, gl) = (grid[last], values[last]);
                let tail = |from: f64| {
                    gl * tl.powf(*tail_power) * from.powf(2.0 - tail_power) / (tail_power - 2.0)
                };
                if t >= tl {
                    return tail(t);
                }
                let mut total = tail(tl);
                // Linear pieces: Simpson is exact for t * G(t).
                let piece = |a: f64, b: f64| {
                    let mid = 0.5 * (a + b);
                    (b - a) / 6.0 * (a * self.g(a) + 4.0 * mid * self.g(mid) + b * self.g(b))
                };
                if t < grid[0] {
                    total += 0.5 * values[0] * (grid[0] * grid[0] - t * t);
                }
                for w in grid.windows(2) {
                    if w[1] <= t {
                        continue;
                    }
                    total += piece(w[0].max(t), w[1]);
                }
                total
            }
        }
    }

    /// `int_0^inf t G(t) dt` by quadrature, independent of the cached value.
    pub fn moment_by_quadrature(&self, cfg: &QuadratureConfig) -> Result<f64> {
        curvature_moment(|t| self.g(t), self.decay_power(), cfg)
    }

    /// Parses `zero`, `const:<a>:<t_cut>`, `rational:<b0>` or `table:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.trim().splitn(2, ':');
        let head = parts.next().unwrap_or_default();
        let rest = parts.next();
        let number = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Profile(format!("cannot parse {what} from '{s}' in '{spec}'")))
        };
        match (head, rest) {
            ("zero", None) => Ok(Self::zero()),
            ("const", Some(args)) => {
                let (a, cut) = args
                    .split_once(':')
                    .ok_or_else(|| Error::Profile(format!("expected const:<a>:<t_cut>, got '{spec}'")))?;
                Self::constant_cutoff(number(a, "a")?, number(cut, "t_cut")?)
            }
            ("rational", Some(b0)) => Self::rational_decay(number(b0, "b0")?),
            ("table", Some(path)) => Self::from_table_file(Path::new(path)),
            _ => Err(Error::Profile(format!(
                "unknown curvature spec '{spec}' (expected zero, const:<a>:<t_cut>, rational:<b0>, table:<path>)"
            ))),
        }
    }

    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Profile(format!("cannot read table {}: {e}", path.display())))?;
        Self::from_table_str(&text)
    }

    /// Two whitespace-separated columns `t G(t)`, `#` comments, and a
    /// mandatory `# tail_power=<q>` directive.
    pub fn from_table_str(text: &str) -> Result<Self> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        let mut tail_power = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(q) = comment.trim().strip_prefix("tail_power=") {
                    tail_power = Some(q.trim().parse::<f64>().map_err(|_| {
                        Error::Profile(format!("line {}: bad tail_power '{q}'", lineno + 1))
                    })?);
                }
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::Profile(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Profile(format!("line {}: bad number '{s}'", lineno + 1)))
            };
            grid.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        let tail_power = tail_power
            .ok_or_else(|| Error::Profile("missing '# tail_power=<q>' directive".into()))?;
        Self::tabulated(grid, values, tail_power)
    }
}

/// `int_0^inf t G(t) dt` for an arbitrary non-negative `G` decaying like
/// `t^-decay` (when known).
pub fn curvature_moment<G: Fn(f64) -> f64>(
    g: G,
    decay: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let hints = EndpointHints {
        origin_power: Some(1.0),
        tail_decay: decay.map(|d| d - 1.0),
    };
    integrate_semi_infinite_with(|t| t * g(t), hints, cfg)
}
