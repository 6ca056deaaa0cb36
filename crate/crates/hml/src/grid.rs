//! Experiment grids: `;`-separated axes `NAME=values`, cartesian product with
//! the first axis outermost. Values are a comma list or `start:stop:xF`
//! (geometric) / `start:stop:+S` (arithmetic).
//!
//! Axes: `T`, `N`, `A`, `alpha`, `eps`.

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridPoint {
    pub t: Option<f64>,
    pub n: Option<u64>,
    pub a: Option<f64>,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    T,
    N,
    A,
    Alpha,
    Eps,
}

fn axis(name: &str) -> Result<Axis, CliError> {
    match name.trim() {
        "T" | "t" => Ok(Axis::T),
        "N" | "n" => Ok(Axis::N),
        "A" | "a" => Ok(Axis::A),
        "alpha" | "ALPHA" | "α" => Ok(Axis::Alpha),
        "eps" | "EPS" | "eps_slack" => Ok(Axis::Eps),
        other => Err(CliError::Config(format!("unknown grid axis '{other}'"))),
    }
}

fn num(s: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::Config(format!("bad number '{s}'")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("non-finite value '{s}'")));
    }
    Ok(v)
}

/// Values of one axis.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(CliError::Config("empty value list".into()));
    }
    if !spec.contains(':') {
        return spec.split(',').map(num).collect();
    }
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("range '{spec}' must be start:stop:step")));
    }
    let (start, stop) = (num(parts[0])?, num(parts[1])?);
    if stop < start {
        return Err(CliError::Config(format!("range '{spec}' has stop < start")));
    }
    let step = parts[2].trim();
    let slack = 1e-12 * stop.abs().max(1.0);
    let mut out = Vec::new();
    if let Some(f) = step.strip_prefix('x') {
        let f = num(f)?;
        if !(f > 1.0) || !(start > 0.0) {
            return Err(CliError::Config(format!("geometric range '{spec}' needs start > 0 and factor > 1")));
        }
        // start·f^i rather than repeated multiplication, so the grid is exact for f = 2
        let mut i = 0;
        loop {
            let v = start * f.powi(i);
            if v > stop + slack {
                break;
            }
            out.push(v);
            i += 1;
        }
    } else {
        let s = num(step.strip_prefix('+').unwrap_or(step))?;
        if !(s > 0.0) {
            return Err(CliError::Config(format!("arithmetic range '{spec}' needs step > 0")));
        }
        let mut i = 0u32;
        loop {
            let v = start + s * i as f64;
            if v > stop + slack {
                break;
            }
            out.push(v);
            i += 1;
        }
    }
    Ok(out)
}

/// Parses a grid such as `T=500:16000:x2` or `N=1000;A=0.5,1,2,4`.
pub fn parse_grid(s: &str) -> Result<Vec<GridPoint>, CliError> {
    let mut axes: Vec<(Axis, Vec<f64>)> = Vec::new();
    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
        let (name, vals) =
            part.split_once('=').ok_or_else(|| CliError::Config(format!("grid axis '{part}' lacks '='")))?;
        let ax = axis(name)?;
        if axes.iter().any(|(a, _)| *a == ax) {
            return Err(CliError::Config(format!("grid axis '{}' given twice", name.trim())));
        }
        let v = parse_values(vals)?;
        if ax == Axis::N && v.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
            return Err(CliError::Config("N values must be positive integers".into()));
        }
        axes.push((ax, v));
    }
    if axes.is_empty() {
        return Err(CliError::Config("empty grid".into()));
    }
    let mut points = vec![GridPoint::default()];
    for (ax, vals) in &axes {
        let mut next = Vec::with_capacity(points.len() * vals.len());
        for p in &points {
            for &v in vals {
                let mut q = *p;
                match ax {
                    Axis::T => q.t = Some(v),
                    Axis::N => q.n = Some(v as u64),
                    Axis::A => q.a = Some(v),
                    Axis::Alpha => q.alpha = Some(v),
                    Axis::Eps => q.eps = Some(v),
                }
                next.push(q);
            }
        }
        points = next;
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_range() {
        let v = parse_values("500:16000:x2").unwrap();
        assert_eq!(v, vec![500.0, 1000.0, 2000.0, 4000.0, 8000.0, 16000.0]);
        assert_eq!(parse_values("1:2:+0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_values("1:3:1").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_values("0:10:x2").is_err());
        assert!(parse_values("10:1:x2").is_err());
    }

    #[test]
    fn product_order() {
        let g = parse_grid("N=1000;A=0.5,1,2,4").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g[0].n, Some(1000));
        assert_eq!(g.iter().map(|p| p.a.unwrap()).collect::<Vec<_>>(), vec![0.5, 1.0, 2.0, 4.0]);
        let g = parse_grid("alpha=-0.3,0;T=1000,2000").unwrap();
        assert_eq!(g[1].alpha, Some(-0.3));
        assert_eq!(g[1].t, Some(2000.0));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "T", "Q=1", "T=1;T=2", "N=1.5", "T=a", "T=1:2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
