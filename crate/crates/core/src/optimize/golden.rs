//! Golden-section maximization of a unimodal scalar function.

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximize `f` on `[a, b]` until the bracket is narrower than `tol`.
/// Returns the best abscissa seen and its value. The endpoints are not
/// evaluated; callers that care about boundary optima check them separately.
pub fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}
