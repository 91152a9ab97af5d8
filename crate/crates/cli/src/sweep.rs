//! Parameter sweeps over `alpha`, `k` and `lambda`.

use rayon::prelude::*;

use crate::config::{CurveKind, RunConfig};
use crate::error::CliError;
use crate::scenario::{execute, fmt_f64};

pub const MAX_COMBINATIONS: usize = 10_000;
pub const TABLE_HEADER: &str = "alpha,k,lambda,regime,rate,beta,r_squared,exponential_rate,error";

/// Values per swept parameter; an absent parameter keeps the base value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Grid {
    pub alpha: Option<Vec<f64>>,
    pub k: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
}

impl Grid {
    /// `alpha=0.25,0.5,1;k=1;lambda=0.5,2.5`. An empty string is an empty grid.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut g = Grid::default();
        let text = text.trim();
        if text.is_empty() {
            return Ok(g);
        }
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .ok_or_else(|| CliError::config("grid", format!("expected key=values in {part:?}")))?;
            let values = values
                .split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        CliError::config("grid", format!("{}: bad number {v:?}", key.trim()))
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let slot = match key.trim() {
                "alpha" => &mut g.alpha,
                "k" => &mut g.k,
                "lambda" => &mut g.lambda,
                other => {
                    return Err(CliError::config(
                        "grid",
                        format!("unknown parameter {other:?}; expected alpha, k or lambda"),
                    ))
                }
            };
            if slot.replace(values).is_some() {
                return Err(CliError::config("grid", format!("{} given twice", key.trim())));
            }
        }
        Ok(g)
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_none() && self.k.is_none() && self.lambda.is_none()
    }

    /// Number of combinations, saturating on overflow.
    pub fn len(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        [&self.alpha, &self.k, &self.lambda]
            .iter()
            .map(|v| v.as_ref().map_or(1, Vec::len))
            .fold(1usize, usize::saturating_mul)
    }

    /// Combinations in lexicographic order (alpha outermost, lambda innermost).
    pub fn combinations(&self, base: &RunConfig) -> Vec<Point> {
        if self.is_empty() {
            return Vec::new();
        }
        let pick = |v: &Option<Vec<f64>>, d: Option<f64>| match v {
            Some(v) => v.iter().map(|&x| Some(x)).collect::<Vec<_>>(),
            None => vec![d],
        };
        let base_lambda = base.controller.enabled.then_some(base.controller.lambda).flatten();
        let mut out = Vec::with_capacity(self.len());
        for &alpha in &pick(&self.alpha, base.curve.alpha) {
            for &k in &pick(&self.k, Some(base.curve.k)) {
                for &lambda in &pick(&self.lambda, base_lambda) {
                    out.push(Point {
                        alpha,
                        k: k.unwrap_or(base.curve.k),
                        lambda,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub alpha: Option<f64>,
    pub k: f64,
    pub lambda: Option<f64>,
}

impl Point {
    fn apply(&self, base: &RunConfig) -> RunConfig {
        let mut c = base.clone();
        c.curve.alpha = self.alpha;
        c.curve.k = self.k;
        if let Some(l) = self.lambda {
            c.controller.enabled = true;
            c.controller.lambda = Some(l);
        }
        c
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Runs every combination (in parallel) and renders the table in grid order.
/// `rate` belongs to the winning model; `exponential_rate` is comparable across rows.
/// A failing combination yields a row with an empty fit and the error message.
pub fn sweep(base: &RunConfig, grid: &Grid) -> Result<String, CliError> {
    let n = grid.len();
    if n > MAX_COMBINATIONS {
        return Err(CliError::config(
            "grid",
            format!("{n} combinations exceed the cap of {MAX_COMBINATIONS}"),
        ));
    }
    if grid.alpha.is_some() && base.curve.kind != CurveKind::PowerLaw {
        return Err(CliError::config("grid", "alpha sweeps need curve.kind = \"power_law\""));
    }
    let points = grid.combinations(base);
    let configs: Vec<RunConfig> = points.iter().map(|p| p.apply(base)).collect();
    for c in &configs {
        c.validate().map_err(|m| CliError::config("grid", m))?;
    }
    let rows: Vec<String> = points
        .par_iter()
        .zip(configs.par_iter())
        .map(|(p, c)| {
            let head = format!("{},{},{}", opt(p.alpha), fmt_f64(p.k), opt(p.lambda));
            match execute(c) {
                Ok(o) => format!(
                    "{head},{},{},{},{},{},",
                    o.fit.regime,
                    fmt_f64(o.fit.rate),
                    opt(o.fit.stretch_exponent),
                    fmt_f64(o.fit.r_squared),
                    fmt_f64(o.fit.exponential.rate)
                ),
                Err(e) => format!("{head},,,,,,\"{}\"", e.to_string().replace('"', "'")),
            }
        })
        .collect();
    let mut table = String::from(TABLE_HEADER);
    table.push('\n');
    for r in rows {
        table.push_str(&r);
        table.push('\n');
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn parses_grid_text() {
        let g = Grid::parse("alpha=0.25, 0.5,1; k=1").unwrap();
        assert_eq!(g.alpha, Some(vec![0.25, 0.5, 1.0]));
        assert_eq!(g.k, Some(vec![1.0]));
        assert_eq!(g.lambda, None);
        assert_eq!(g.len(), 3);
        assert!(Grid::parse("beta=1").is_err());
        assert!(Grid::parse("k=1;k=2").is_err());
        assert!(Grid::parse("k=x").is_err());
        assert!(Grid::parse("").unwrap().is_empty());
    }

    #[test]
    fn lexicographic_order() {
        let base = preset("thm11").unwrap();
        let g = Grid::parse("alpha=1,2;lambda=3,4").unwrap();
        let pts: Vec<(Option<f64>, Option<f64>)> =
            g.combinations(&base).iter().map(|p| (p.alpha, p.lambda)).collect();
        assert_eq!(
            pts,
            vec![
                (Some(1.0), Some(3.0)),
                (Some(1.0), Some(4.0)),
                (Some(2.0), Some(3.0)),
                (Some(2.0), Some(4.0))
            ]
        );
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let t = sweep(&preset("thm11").unwrap(), &Grid::default()).unwrap();
        assert_eq!(t, format!("{TABLE_HEADER}\n"));
    }

    #[test]
    fn cap_enforced_before_running() {
        let many: Vec<String> = (1..=101).map(|i| i.to_string()).collect();
        let text = format!("alpha={0};k={0}", many.join(","));
        let e = sweep(&preset("thm11").unwrap(), &Grid::parse(&text).unwrap()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
