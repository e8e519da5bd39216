//! N-functions `Phi(x) = int_0^x p(t) dt` given by their densities.

use crate::error::{Error, Result};

/// Density of an N-function.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    /// `p(t) = t^(p-1)`, so `Phi(x) = x^p / p`.
    Power(f64),
    /// Piecewise-linear density through `(t[i], p[i])`. Breakpoints are
    /// nondecreasing; a repeated breakpoint encodes a jump, and the density
    /// takes the later (right) value there.
    Table { t: Vec<f64>, p: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NFunction {
    density: Density,
    /// `Phi(t[i])` for the tabulated kind.
    cumulative: Vec<f64>,
}

impl NFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("power N-function needs p > 1, got {p}")));
        }
        Ok(Self { density: Density::Power(p), cumulative: Vec::new() })
    }

    pub fn table(t: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        validate_table(&t, &p)?;
        let mut cumulative = Vec::with_capacity(t.len());
        cumulative.push(0.0);
        for i in 0..t.len() - 1 {
            let area = 0.5 * (t[i + 1] - t[i]) * (p[i] + p[i + 1]);
            cumulative.push(cumulative[i] + area);
        }
        Ok(Self { density: Density::Table { t, p }, cumulative })
    }

    /// Tabulates a power density `t^(p-1)` on `cells` equal cells of `[0, t_max]`.
    pub fn tabulated_power(p: f64, t_max: f64, cells: usize) -> Result<Self> {
        Self::power(p)?;
        if cells == 0 || !(t_max > 0.0) {
            return Err(Error::InvalidInput("tabulation needs t_max > 0 and at least one cell".into()));
        }
        let t: Vec<f64> = (0..=cells).map(|i| t_max * i as f64 / cells as f64).collect();
        let dens = t.iter().map(|&x| x.powf(p - 1.0)).collect();
        Self::table(t, dens)
    }

    pub fn density_kind(&self) -> &Density {
        &self.density
    }

    /// Largest argument covered; infinite for the power kind.
    pub fn t_max(&self) -> f64 {
        match &self.density {
            Density::Power(_) => f64::INFINITY,
            Density::Table { t, .. } => *t.last().expect("nonempty table"),
        }
    }

    /// `p(x)`, right-continuous at jumps.
    pub fn density(&self, x: f64) -> Result<f64> {
        match &self.density {
            Density::Power(p) => Ok(x.powf(p - 1.0)),
            Density::Table { t, p } => {
                self.check_range(x)?;
                let i = cell_of(t, x);
                if i + 1 == t.len() {
                    return Ok(p[i]);
                }
                let w = (x - t[i]) / (t[i + 1] - t[i]);
                Ok(p[i] + w * (p[i + 1] - p[i]))
            }
        }
    }

    fn check_range(&self, x: f64) -> Result<()> {
        let max = self.t_max();
        if !(x >= 0.0) || x > max {
            return Err(Error::OutOfRange { x, max });
        }
        Ok(())
    }

    /// `Phi(x)`.
    pub fn phi_value(&self, x: f64) -> Result<f64> {
        match &self.density {
            Density::Power(p) => {
                self.check_range(x)?;
                Ok(x.powf(*p) / p)
            }
            Density::Table { t, p } => {
                self.check_range(x)?;
                let i = cell_of(t, x);
                if i + 1 == t.len() {
                    return Ok(self.cumulative[i]);
                }
                let u = x - t[i];
                let slope = (p[i + 1] - p[i]) / (t[i + 1] - t[i]);
                Ok(self.cumulative[i] + u * (p[i] + 0.5 * slope * u))
            }
        }
    }

    /// The `x` with `Phi(x) = y`.
    pub fn phi_inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::OutOfRange { x: y, max: f64::INFINITY });
        }
        match &self.density {
            Density::Power(p) => Ok((p * y).powf(1.0 / p)),
            Density::Table { t, p } => {
                let total = *self.cumulative.last().expect("nonempty table");
                if y > total {
                    return Err(Error::OutOfRange { x: y, max: total });
                }
                if y == 0.0 {
                    return Ok(0.0);
                }
                // first cell whose right end reaches y
                let i = self.cumulative.partition_point(|&c| c < y).max(1) - 1;
                let d = y - self.cumulative[i];
                let width = t[i + 1] - t[i];
                let slope = (p[i + 1] - p[i]) / width;
                let disc = (p[i] * p[i] + 2.0 * slope * d).max(0.0);
                let u = 2.0 * d / (p[i] + disc.sqrt());
                Ok((t[i] + u).min(t[i + 1]))
            }
        }
    }

    /// Complementary N-function built from `q(s) = sup{t : p(t) <= s}`.
    pub fn complementary(&self) -> Result<Self> {
        match &self.density {
            Density::Power(p) => Self::power(p / (p - 1.0)),
            Density::Table { t, p } => {
                let mut s_pts: Vec<f64> = Vec::with_capacity(2 * t.len());
                let mut q_pts: Vec<f64> = Vec::with_capacity(2 * t.len());
                let mut push = |s: f64, q: f64| {
                    if s_pts.last() != Some(&s) || q_pts.last() != Some(&q) {
                        s_pts.push(s);
                        q_pts.push(q);
                    }
                };
                for i in 0..t.len() - 1 {
                    // a jump in p is a flat piece of q and vice versa
                    push(p[i], t[i]);
                    if p[i] == p[i + 1] {
                        push(p[i], t[i + 1]);
                    } else if t[i] == t[i + 1] {
                        push(p[i + 1], t[i]);
                    } else {
                        push(p[i + 1], t[i + 1]);
                    }
                }
                Self::table(s_pts, q_pts).map_err(|_| Error::DegenerateDensity)
            }
        }
    }

    /// `max Phi(2x) / Phi(x)` over `x = 2^-j`, `j = 1..=depth`, within range.
    pub fn delta2_zero_estimate(&self, depth: usize) -> Result<f64> {
        if depth < 4 {
            return Err(Error::InvalidInput(format!("depth must be at least 4, got {depth}")));
        }
        let mut best: f64 = 0.0;
        let mut x = 1.0f64;
        for _ in 0..depth {
            x *= 0.5;
            if 2.0 * x > self.t_max() {
                continue;
            }
            let base = self.phi_value(x)?;
            if base < 1e-300 {
                break;
            }
            best = best.max(self.phi_value(2.0 * x)? / base);
        }
        Ok(best)
    }
}

/// Index of the last breakpoint `<= x`; at a jump this is the later copy.
fn cell_of(t: &[f64], x: f64) -> usize {
    t.partition_point(|&b| b <= x).saturating_sub(1)
}

fn validate_table(t: &[f64], p: &[f64]) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidInput(format!("density table: {m}")));
    if t.len() != p.len() {
        return bad("t and p lengths differ");
    }
    if t.len() < 2 {
        return bad("needs at least two breakpoints");
    }
    if t[0] != 0.0 || p[0] != 0.0 {
        return bad("must start at t = 0 with p(0) = 0");
    }
    if t.iter().chain(p).any(|v| !v.is_finite()) {
        return bad("non-finite entry");
    }
    for i in 0..t.len() - 1 {
        if t[i + 1] < t[i] {
            return bad("breakpoints must be nondecreasing");
        }
        if p[i + 1] < p[i] {
            return bad("density must be nondecreasing");
        }
        if i + 2 < t.len() && t[i] == t[i + 1] && t[i + 1] == t[i + 2] {
            return bad("at most one jump per breakpoint");
        }
    }
    if *t.last().unwrap() <= 0.0 {
        return bad("range must have positive length");
    }
    // p > 0 on (0, t_max]: the density right after 0 must be positive
    let first_positive = t.iter().position(|&b| b > 0.0).expect("positive range");
    if first_positive > 1 {
        // a jump at 0 leaves p(0+) = p[first_positive - 1]
        if p[first_positive - 1] <= 0.0 {
            return bad("density must be positive for t > 0");
        }
    } else if p[1] <= 0.0 {
        return bad("density must be positive for t > 0");
    }
    Ok(())
}
