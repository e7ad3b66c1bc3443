//! Straight-line transcription of the iteration formulas, kept deliberately
//! separate from the library so the two can disagree. Everything here works
//! on bare `Vec<f64>` and evaluates the displayed recurrences term by term.

pub type Map<'a> = &'a dyn Fn(&[f64]) -> Vec<f64>;

pub fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn matvec_t(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..m.len()).map(|i| m[i][j] * x[i]).sum())
        .collect()
}

/// U = (1 - eta) I + eta T((1 - zeta) I + zeta T), written exactly as displayed.
pub fn normalized(t: Map, eta: f64, zeta: f64, z: &[f64]) -> Vec<f64> {
    let tz = t(z);
    let inner: Vec<f64> = z
        .iter()
        .zip(&tz)
        .map(|(zi, ti)| (1.0 - zeta) * zi + zeta * ti)
        .collect();
    let t_inner = t(&inner);
    z.iter()
        .zip(&t_inner)
        .map(|(zi, ti)| (1.0 - eta) * zi + eta * ti)
        .collect()
}

/// One coupled step of the split iteration:
///   v = (1 - tau) x + tau U x + tau D1^T (D2 y - D1 x),   x+ = (1 - alpha) v + alpha U v
///   w = (1 - tau) y + tau V y + tau D2^T (D1 x - D2 y),   y+ = (1 - alpha) w + alpha V w
#[allow(clippy::too_many_arguments)]
pub fn coupled_step(
    t1: Map,
    t2: Map,
    d1: &[Vec<f64>],
    d2: &[Vec<f64>],
    eta: f64,
    zeta: f64,
    alpha: f64,
    tau: f64,
    x: &[f64],
    y: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let d1x = matvec(d1, x);
    let d2y = matvec(d2, y);
    let gap: Vec<f64> = d2y.iter().zip(&d1x).map(|(a, b)| a - b).collect();
    let cx = matvec_t(d1, &gap);
    let neg: Vec<f64> = gap.iter().map(|g| -g).collect();
    let cy = matvec_t(d2, &neg);

    let ux = normalized(t1, eta, zeta, x);
    let v: Vec<f64> = (0..x.len())
        .map(|i| (1.0 - tau) * x[i] + tau * ux[i] + tau * cx[i])
        .collect();
    let uv = normalized(t1, eta, zeta, &v);
    let x_next = (0..x.len())
        .map(|i| (1.0 - alpha) * v[i] + alpha * uv[i])
        .collect();

    let vy = normalized(t2, eta, zeta, y);
    let w: Vec<f64> = (0..y.len())
        .map(|i| (1.0 - tau) * y[i] + tau * vy[i] + tau * cy[i])
        .collect();
    let vw = normalized(t2, eta, zeta, &w);
    let y_next = (0..y.len())
        .map(|i| (1.0 - alpha) * w[i] + alpha * vw[i])
        .collect();

    (x_next, y_next)
}

/// One decoupled relaxed step applied to a raw mapping:
///   v = (1 - tau) x + tau T x,   x+ = (1 - alpha) v + alpha T v
pub fn decoupled_step(t: Map, alpha: f64, tau: f64, x: &[f64]) -> Vec<f64> {
    let tx = t(x);
    let v: Vec<f64> = (0..x.len())
        .map(|i| (1.0 - tau) * x[i] + tau * tx[i])
        .collect();
    let tv = t(&v);
    (0..x.len())
        .map(|i| (1.0 - alpha) * v[i] + alpha * tv[i])
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}
