use std::cell::RefCell;

use super::rk4::rk4_step;
use super::{NumericError, Poly, RExpr};

/// How the components evolve inside one situation.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// No rate is active: every component keeps its initial value.
    Frozen,
    /// Every component is a polynomial in `t - start`.
    Closed(Vec<Poly>),
    /// Joint RK4 integration of all components.
    Ode(Vec<RExpr>),
}

/// Values of a vector of temporal quantities from `start` on, given their
/// initial values and rates (`None` meaning constant).
#[derive(Debug)]
pub struct Evolution {
    start: f64,
    init: Vec<f64>,
    mode: Mode,
    h: f64,
    /// RK4 states at `start + k h`, flattened.
    grid: RefCell<Vec<f64>>,
}

impl Evolution {
    pub fn new(start: f64, init: Vec<f64>, rates: Vec<Option<RExpr>>, h: f64) -> Self {
        let mode = if rates.iter().all(Option::is_none) {
            Mode::Frozen
        } else {
            closed_forms(start, &init, &rates).map(Mode::Closed).unwrap_or_else(|| {
                Mode::Ode(rates.into_iter().map(|r| r.unwrap_or(RExpr::Const(0.0))).collect())
            })
        };
        let grid = RefCell::new(init.clone());
        Evolution { start, init, mode, h, grid }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn init(&self) -> &[f64] {
        &self.init
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Closed forms in `t - start` for every component, when known.
    pub fn polys(&self) -> Vec<Option<Poly>> {
        match &self.mode {
            Mode::Frozen => self.init.iter().map(|v| Some(Poly::constant(*v))).collect(),
            Mode::Closed(ps) => ps.iter().cloned().map(Some).collect(),
            Mode::Ode(_) => vec![None; self.init.len()],
        }
    }

    pub fn values_at(&self, t: f64) -> Result<Vec<f64>, NumericError> {
        if t < self.start {
            return Err(NumericError::BeforeStart { t, start: self.start });
        }
        match &self.mode {
            Mode::Frozen => Ok(self.init.clone()),
            Mode::Closed(ps) => Ok(ps.iter().map(|p| p.eval(t - self.start)).collect()),
            Mode::Ode(rates) => {
                let n = self.init.len();
                let k = ((t - self.start) / self.h).floor() as usize;
                let tk = self.grid_time(k);
                // Floating error can put t just below its grid point.
                let (k, tk) = if tk > t && k > 0 { (k - 1, self.grid_time(k - 1)) } else { (k, tk) };
                self.extend_grid(rates, k)?;
                let grid = self.grid.borrow();
                let y = &grid[k * n..(k + 1) * n];
                if t > tk {
                    rk4_step(rates, tk, y, t - tk)
                } else {
                    Ok(y.to_vec())
                }
            }
        }
    }

    pub fn value(&self, i: usize, t: f64) -> Result<f64, NumericError> {
        Ok(self.values_at(t)?[i])
    }

    fn grid_time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.h
    }

    fn extend_grid(&self, rates: &[RExpr], k: usize) -> Result<(), NumericError> {
        let n = self.init.len();
        let mut grid = self.grid.borrow_mut();
        let have = grid.len() / n.max(1);
        if n == 0 {
            return Ok(());
        }
        for j in have..=k {
            let y = grid[(j - 1) * n..j * n].to_vec();
            let next = rk4_step(rates, self.grid_time(j - 1), &y, self.h)?;
            grid.extend(next);
        }
        Ok(())
    }
}

/// Integrates polynomial rates symbolically, resolving components whose
/// rates mention other already-resolved components. `None` when some
/// rate is not a polynomial in time and the resolved components.
fn closed_forms(start: f64, init: &[f64], rates: &[Option<RExpr>]) -> Option<Vec<Poly>> {
    let n = init.len();
    let mut polys: Vec<Option<Poly>> = rates
        .iter()
        .zip(init)
        .map(|(r, v)| if r.is_none() { Some(Poly::constant(*v)) } else { None })
        .collect();
    loop {
        let mut progress = false;
        for i in 0..n {
            if polys[i].is_some() {
                continue;
            }
            if let Some(p) = rates[i].as_ref().unwrap().to_poly(start, &polys) {
                polys[i] = Some(p.integral().add(&Poly::constant(init[i])));
                progress = true;
            }
        }
        if polys.iter().all(Option::is_some) {
            return Some(polys.into_iter().map(Option::unwrap).collect());
        }
        if !progress {
            return None;
        }
    }
}
