use std::str::FromStr;

use fracflow::{Axis, Direction};

/// Direction sets accepted by `--normals`.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalSet {
    Axes,
    Fibonacci(usize),
}

impl NormalSet {
    pub fn directions(&self) -> Vec<Direction> {
        match self {
            NormalSet::Axes => Axis::ALL.into_iter().map(Direction::axis).collect(),
            NormalSet::Fibonacci(k) => fibonacci_directions(*k),
        }
    }
}

impl FromStr for NormalSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("axes") {
            return Ok(NormalSet::Axes);
        }
        if let Some(k) = s.strip_prefix("fibonacci:") {
            let k: usize = k.parse().map_err(|_| format!("bad point count in {s:?}"))?;
            if k == 0 {
                return Err("fibonacci needs at least one point".into());
            }
            return Ok(NormalSet::Fibonacci(k));
        }
        Err(format!("expected `axes` or `fibonacci:K`, got {s:?}"))
    }
}

/// `k` near-uniform unit vectors on the sphere (golden-angle spiral);
/// `k = 1` gives `eₓ`.
pub fn fibonacci_directions(k: usize) -> Vec<Direction> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / k as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Direction::normalized([r * phi.cos(), r * phi.sin(), z]).expect("unit vector")
        })
        .collect()
}

/// Parses `x`, `y`, `z` or three comma-separated components (normalized).
pub fn parse_direction(s: &str) -> Result<Direction, String> {
    if let Ok(axis) = s.trim().parse::<Axis>() {
        return Ok(Direction::axis(axis));
    }
    let v = parse_triple(s)?;
    Direction::normalized(v).map_err(|e| e.to_string())
}

pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("bad number {p:?}"))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_are_unit_and_spread() {
        let dirs = fibonacci_directions(50);
        assert_eq!(dirs.len(), 50);
        let mean = dirs.iter().fold([0.0; 3], |m, d| {
            let c = d.components();
            [m[0] + c[0], m[1] + c[1], m[2] + c[2]]
        });
        assert!(mean.iter().all(|m| m.abs() / 50.0 < 0.05));
        assert_eq!(fibonacci_directions(1)[0].components(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn parsing() {
        assert_eq!("axes".parse::<NormalSet>().unwrap().directions().len(), 3);
        assert_eq!("fibonacci:7".parse::<NormalSet>().unwrap(), NormalSet::Fibonacci(7));
        assert!("fibonacci:0".parse::<NormalSet>().is_err());
        assert!("sphere".parse::<NormalSet>().is_err());
        let d = parse_direction("0,0,2").unwrap();
        assert_eq!(d.components(), [0.0, 0.0, 1.0]);
        assert_eq!(parse_direction("y").unwrap().components(), [0.0, 1.0, 0.0]);
        assert!(parse_direction("1,0").is_err());
        assert!(parse_direction("0,0,0").is_err());
    }
}
