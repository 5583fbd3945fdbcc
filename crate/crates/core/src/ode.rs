//! Classical fourth-order Runge–Kutta step for small autonomous systems.

pub(crate) fn rk4_step<const D: usize>(
    f: &impl Fn(&[f64; D]) -> [f64; D],
    y: &[f64; D],
    h: f64,
) -> [f64; D] {
    let dy = rk4_increment(f, y, h);
    let mut out = *y;
    for i in 0..D {
        out[i] += dy[i];
    }
    out
}

/// The RK4 update `y(x + h) − y(x)`.
pub(crate) fn rk4_increment<const D: usize>(
    f: &impl Fn(&[f64; D]) -> [f64; D],
    y: &[f64; D],
    h: f64,
) -> [f64; D] {
    let add = |y: &[f64; D], k: &[f64; D], s: f64| -> [f64; D] {
        let mut out = *y;
        for i in 0..D {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, 0.5 * h));
    let k3 = f(&add(y, &k2, 0.5 * h));
    let k4 = f(&add(y, &k3, h));
    let mut dy = [0.0; D];
    for i in 0..D {
        dy[i] = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    dy
}

/// RK4 integration with compensated (Kahan) accumulation of the state, which
/// keeps rounding drift flat over long runs of small steps.
pub(crate) struct CompensatedRk4<const D: usize> {
    pub y: [f64; D],
    carry: [f64; D],
}

impl<const D: usize> CompensatedRk4<D> {
    pub(crate) fn new(y: [f64; D]) -> Self {
        Self { y, carry: [0.0; D] }
    }

    pub(crate) fn step(&mut self, f: &impl Fn(&[f64; D]) -> [f64; D], h: f64) {
        let dy = rk4_increment(f, &self.y, h);
        for (i, d) in dy.iter().enumerate() {
            let add = d - self.carry[i];
            let next = self.y[i] + add;
            self.carry[i] = (next - self.y[i]) - add;
            self.y[i] = next;
        }
    }
}
