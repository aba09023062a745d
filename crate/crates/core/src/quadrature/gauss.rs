//! Gauss–Legendre rules on `[-1, 1]` together with the spectral
//! integration matrix used for cumulative (indefinite) integrals.

use std::f64::consts::PI;

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `integration[i][j] = (\int_{-1}^{x_i} l_j(s) ds) / w_j`, with `l_j` the
    /// Lagrange basis on the nodes; multiplying by `w_j f_j` and summing over
    /// `j` integrates the interpolant of `f` from `-1` to `x_i`.
    pub integration: Vec<Vec<f64>>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }

        // l_j(s) = w_j \sum_k (2k+1)/2 P_k(x_j) P_k(s), exact since deg l_j = n-1.
        let basis_at_nodes: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        let integration = nodes
            .iter()
            .map(|&xi| {
                let p = legendre_all(n, xi);
                let antideriv: Vec<f64> = (0..n)
                    .map(|k| {
                        if k == 0 {
                            xi + 1.0
                        } else {
                            (p[k + 1] - p[k - 1]) / (2 * k + 1) as f64
                        }
                    })
                    .collect();
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| 0.5 * (2 * k + 1) as f64 * basis_at_nodes[j][k] * antideriv[k])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Self {
            nodes,
            weights,
            integration,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }
}
