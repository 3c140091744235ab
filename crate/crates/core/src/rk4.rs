use num_complex::Complex64;

/// Classical four-stage Runge-Kutta on a flat complex state vector.
/// Scratch buffers are reused between steps.
pub(crate) struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    pub fn step<F>(&mut self, y: &mut [Complex64], t: f64, dt: f64, f: &mut F)
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let h = dt;
        f(t, y, &mut self.k1);
        for ((tmp, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *tmp = y + k * (0.5 * h);
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k2);
        for ((tmp, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *tmp = y + k * (0.5 * h);
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k3);
        for ((tmp, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *tmp = y + k * h;
        }
        f(t + h, &self.tmp, &mut self.k4);
        let w = h / 6.0;
        for (i, y) in y.iter_mut().enumerate() {
            *y += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_rotation() {
        // y' = i y, exact y = exp(i t)
        let run = |n: usize| {
            let mut y = vec![Complex64::new(1.0, 0.0)];
            let mut rk = Rk4::new(1);
            let dt = 1.0 / n as f64;
            for k in 0..n {
                rk.step(&mut y, k as f64 * dt, dt, &mut |_t, y, dy| {
                    dy[0] = Complex64::i() * y[0];
                });
            }
            (y[0] - Complex64::new(0.0, 1.0).exp()).norm()
        };
        let order = (run(20) / run(40)).log2();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }
}
