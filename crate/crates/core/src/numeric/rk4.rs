use super::{NumericError, RExpr};

/// `y' = rates(t, y)`, `y(t0) = y0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ivp {
    pub t0: f64,
    pub y0: Vec<f64>,
    pub rates: Vec<RExpr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `values[k]` is the state at `times[k]`.
    pub values: Vec<Vec<f64>>,
}

fn derivative(rates: &[RExpr], t: f64, y: &[f64]) -> Result<Vec<f64>, NumericError> {
    rates.iter().map(|r| r.eval(t, y)).collect()
}

fn axpy(y: &[f64], k: &[f64], a: f64) -> Vec<f64> {
    y.iter().zip(k).map(|(y, k)| y + a * k).collect()
}

/// One classical Runge-Kutta step of size `h` from `(t, y)`.
pub fn rk4_step(rates: &[RExpr], t: f64, y: &[f64], h: f64) -> Result<Vec<f64>, NumericError> {
    let k1 = derivative(rates, t, y)?;
    let k2 = derivative(rates, t + h / 2.0, &axpy(y, &k1, h / 2.0))?;
    let k3 = derivative(rates, t + h / 2.0, &axpy(y, &k2, h / 2.0))?;
    let k4 = derivative(rates, t + h, &axpy(y, &k3, h))?;
    let out: Vec<f64> =
        (0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(NumericError::Diverged { time: t + h });
    }
    Ok(out)
}

/// Fixed-step solution on `[t0, t1]`, sampled at `t0 + k h` plus `t1`.
pub fn integrate(ivp: &Ivp, t1: f64, h: f64) -> Result<Trajectory, NumericError> {
    assert!(h > 0.0 && t1 >= ivp.t0, "integrate needs h > 0 and t1 >= t0");
    let mut times = vec![ivp.t0];
    let mut values = vec![ivp.y0.clone()];
    let mut k = 0u64;
    loop {
        let t = ivp.t0 + k as f64 * h;
        let next = ivp.t0 + (k + 1) as f64 * h;
        let y = values.last().unwrap();
        if next >= t1 {
            if t1 > t {
                let y = rk4_step(&ivp.rates, t, y, t1 - t)?;
                times.push(t1);
                values.push(y);
            }
            break;
        }
        let y = rk4_step(&ivp.rates, t, y, h)?;
        times.push(next);
        values.push(y);
        k += 1;
    }
    Ok(Trajectory { times, values })
}
