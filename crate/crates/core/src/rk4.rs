//! Classical fourth-order Runge–Kutta for autonomous linear systems.
//!
//! Shared by the master-equation integrator (flattened density matrix) and the
//! trajectory propagator (state vector). Scratch buffers are owned by the
//! stepper, so repeated steps do not allocate.

use crate::C64;

#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub fn new(len: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); len];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    pub fn len(&self) -> usize {
        self.tmp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tmp.is_empty()
    }

    /// Advances `y` in place by `h` under `dy/dt = f(y)`.
    pub fn step<F>(&mut self, y: &mut [C64], h: f64, mut f: F)
    where
        F: FnMut(&[C64], &mut [C64]),
    {
        debug_assert_eq!(y.len(), self.len());
        let half = 0.5 * h;

        f(y, &mut self.k1);
        for ((t, yi), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *t = yi + k * half;
        }
        f(&self.tmp, &mut self.k2);
        for ((t, yi), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *t = yi + k * half;
        }
        f(&self.tmp, &mut self.k3);
        for ((t, yi), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *t = yi + k * h;
        }
        f(&self.tmp, &mut self.k4);

        let sixth = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * sixth;
        }
    }
}

/// Splits `[t0, t1]` into the fewest equal substeps no longer than `dt`.
pub fn substeps(t0: f64, t1: f64, dt: f64) -> (usize, f64) {
    let span = t1 - t0;
    if span <= 0.0 {
        return (0, 0.0);
    }
    // guard against 0.1/0.05 = 2.0000000000000004 style round-up
    let n = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
    (n, span / n as f64)
}
