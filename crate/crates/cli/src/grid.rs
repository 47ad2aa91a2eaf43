//! Time grids: `0.1,0.5,1` or `start:stop:step`.

use thiserror::Error;

/// Largest number of points a grid may expand to.
pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("empty time grid")]
    Empty,
    #[error("not a number: {0:?}")]
    Number(String),
    #[error("time must be finite and >= 0, got {0}")]
    Negative(f64),
    #[error("range needs start:stop:step, got {0:?}")]
    Shape(String),
    #[error("range step must be positive, got {0}")]
    Step(f64),
    #[error("range stop {stop} is below start {start}")]
    Reversed { start: f64, stop: f64 },
    #[error("grid expands to more than {MAX_POINTS} points")]
    TooLong,
}

fn number(s: &str) -> Result<f64, GridError> {
    let s = s.trim();
    let x: f64 = s.parse().map_err(|_| GridError::Number(s.to_string()))?;
    if !x.is_finite() {
        return Err(GridError::Number(s.to_string()));
    }
    Ok(x)
}

fn time(s: &str) -> Result<f64, GridError> {
    let x = number(s)?;
    if x < 0.0 {
        return Err(GridError::Negative(x));
    }
    Ok(x)
}

/// Parse a grid of nonnegative times.
///
/// Ranges include `stop` when it lies within `1e-9·step` of a grid point;
/// points are computed as `start + i·step` so no error accumulates.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, GridError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(GridError::Empty);
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(GridError::Shape(spec.to_string()));
        };
        let (start, stop) = (time(a)?, time(b)?);
        let step = number(c)?;
        if step <= 0.0 {
            return Err(GridError::Step(step));
        }
        if stop < start {
            return Err(GridError::Reversed { start, stop });
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if count >= MAX_POINTS as f64 {
            return Err(GridError::TooLong);
        }
        return Ok((0..=count as usize).map(|i| start + i as f64 * step).collect());
    }
    let out = spec.split(',').map(time).collect::<Result<Vec<_>, _>>()?;
    if out.len() > MAX_POINTS {
        return Err(GridError::TooLong);
    }
    Ok(out)
}

/// Inverse of [`parse_grid`] for list grids; every value round-trips.
pub fn format_grid(times: &[f64]) -> String {
    times.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_grid("0.4, 0.6,1").unwrap(), vec![0.4, 0.6, 1.0]);
        assert_eq!(parse_grid("0").unwrap(), vec![0.0]);
    }

    #[test]
    fn ranges() {
        let g = parse_grid("0.1:1:0.1").unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 0.1);
        assert!((g[9] - 1.0).abs() < 1e-15);
        assert_eq!(parse_grid("2:2:0.5").unwrap(), vec![2.0]);
        assert_eq!(parse_grid("0:1:0.3").unwrap().len(), 4);
    }

    #[test]
    fn errors() {
        assert_eq!(parse_grid(" "), Err(GridError::Empty));
        assert!(matches!(parse_grid("1,,2"), Err(GridError::Number(_))));
        assert!(matches!(parse_grid("-1"), Err(GridError::Negative(_))));
        assert!(matches!(parse_grid("nan"), Err(GridError::Number(_))));
        assert!(matches!(parse_grid("0:1"), Err(GridError::Shape(_))));
        assert!(matches!(parse_grid("0:1:0"), Err(GridError::Step(_))));
        assert!(matches!(parse_grid("1:0:0.1"), Err(GridError::Reversed { .. })));
        assert_eq!(parse_grid("0:1:1e-9"), Err(GridError::TooLong));
    }

    #[test]
    fn round_trip() {
        let g = vec![0.1, 1.0 / 3.0, 2.5e-7, 0.0];
        assert_eq!(parse_grid(&format_grid(&g)).unwrap(), g);
    }
}
