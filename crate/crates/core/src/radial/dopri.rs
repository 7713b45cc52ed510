//! Dormand–Prince 5(4) embedded pair with standard step-size control.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// b5 - b4
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

/// State after an integration call.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Endpoint<const N: usize> {
    pub x: f64,
    pub y: [f64; N],
    /// Last accepted step size, a good seed for the next call.
    pub h: f64,
    pub steps: usize,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl Dopri5 {
    /// Integrate from `x0` to `x1 > x0`. `on_step` sees every accepted step
    /// `(x, y, dy/dx)` and may stop the integration early.
    pub fn integrate<const N: usize, F, S>(
        &self,
        mut rhs: F,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        h_init: f64,
        h_max: f64,
        mut on_step: S,
    ) -> Result<Endpoint<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        S: FnMut(f64, &[f64; N], &[f64; N]) -> ControlFlow<()>,
    {
        let mut x = x0;
        let mut y = y0;
        let mut k1 = rhs(x, &y);
        if !finite(&k1) {
            return Err(Error::Integrator {
                rho: x,
                reason: "non-finite right-hand side".into(),
            });
        }
        let span = x1 - x0;
        if span <= 0.0 {
            return Ok(Endpoint {
                x,
                y,
                h: h_init,
                steps: 0,
            });
        }
        let mut h = h_init.min(h_max).min(span);
        let h_floor = 1e-14 * x1.abs().max(1.0);
        let mut steps = 0;
        while x < x1 {
            if steps >= self.max_steps {
                return Err(Error::Integrator {
                    rho: x,
                    reason: format!("exceeded {} steps", self.max_steps),
                });
            }
            let last = x + h >= x1 - h_floor;
            let h_try = if last { x1 - x } else { h };
            let k2 = rhs(x + C2 * h_try, &axpy(&y, h_try, &[(A21, &k1)]));
            let k3 = rhs(x + C3 * h_try, &axpy(&y, h_try, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(
                x + C4 * h_try,
                &axpy(&y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = rhs(
                x + C5 * h_try,
                &axpy(&y, h_try, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                x + h_try,
                &axpy(
                    &y,
                    h_try,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                h_try,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let x_new = if last { x1 } else { x + h_try };
            let k7 = rhs(x_new, &y_new);

            let mut err = 0.0;
            let mut ok = finite(&y_new) && finite(&k7);
            for i in 0..N {
                let e = h_try
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            err = (err / N as f64).sqrt();
            if !err.is_finite() {
                ok = false;
            }

            if ok && err <= 1.0 {
                x = x_new;
                y = y_new;
                k1 = k7;
                steps += 1;
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last {
                    h = (h_try * fac).min(h_max);
                }
                if let ControlFlow::Break(()) = on_step(x, &y, &k1) {
                    break;
                }
            } else {
                let fac = if ok { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
                h = h_try * fac;
                if h < h_floor {
                    return Err(Error::Integrator {
                        rho: x,
                        reason: if ok {
                            "step size underflow".into()
                        } else {
                            "non-finite state (nonlinearity not evaluable?)".into()
                        },
                    });
                }
            }
        }
        Ok(Endpoint { x, y, h, steps })
    }
}
