//! Collocation grid: midpoints of the uniform mesh `l / M`, `l = 0..=M`.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// `M` points `(l + 1/2) / M`. None of them is 0, so `k/t` stays finite.
pub fn collocation_points(m: usize) -> Result<Grid> {
    if m == 0 {
        return Err(Error::Domain("collocation needs at least one point".into()));
    }
    let mf = m as f64;
    Ok(Grid {
        points: (0..m).map(|l| (l as f64 + 0.5) / mf).collect(),
    })
}
