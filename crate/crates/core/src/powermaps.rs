//! Power-type maps `f_{d,λ}` defined by the Schröder conjugacy
//! `f ∘ h = h ∘ A_{d,λ}` with the stretch
//! `A_{d,λ}(x₁,…,x_n) = (d·x₁, …, d·x_{n−1}, d·x_n + ln λ)`.
//!
//! All λ-arithmetic is carried in log space so long compositions stay exact.

use crate::error::{Error, Result};
use crate::geometry::{dist, norm, SpherePoint};
use crate::zorich::{BranchIndex, ZorichMap};

/// Parameters `(d, ln λ)` of the stretch `A_{d,λ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchParams {
    d: i64,
    log_lambda: f64,
}

impl StretchParams {
    pub fn new(d: i64, log_lambda: f64) -> Result<Self> {
        if d.abs() < 2 {
            return Err(Error::invalid(format!("|d| must be at least 2, got {d}")));
        }
        if !log_lambda.is_finite() {
            return Err(Error::invalid("ln λ must be finite"));
        }
        Ok(StretchParams { d, log_lambda })
    }

    pub fn from_lambda(d: i64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::invalid(format!("λ must be positive, got {lambda}")));
        }
        StretchParams::new(d, lambda.ln())
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn log_lambda(&self) -> f64 {
        self.log_lambda
    }

    pub fn lambda(&self) -> f64 {
        self.log_lambda.exp()
    }

    /// `A_p ∘ A_q = A_{d_p d_q, λ_p λ_q^{d_p}}`.
    pub fn compose(&self, inner: &StretchParams) -> Result<StretchParams> {
        let d = self
            .d
            .checked_mul(inner.d)
            .ok_or(Error::DegreeOverflow(self.d, inner.d))?;
        Ok(StretchParams {
            d,
            log_lambda: self.log_lambda + self.d as f64 * inner.log_lambda,
        })
    }

    /// Applies the stretch; `radial_axis` is the coordinate carrying the
    /// log-modulus (see [`ZorichMap::radial_axis`]).
    pub fn apply(&self, x: &[f64], radial_axis: usize) -> Vec<f64> {
        let d = self.d as f64;
        let mut y: Vec<f64> = x.iter().map(|v| d * v).collect();
        y[radial_axis] += self.log_lambda;
        y
    }

    pub fn apply_inverse(&self, x: &[f64], radial_axis: usize) -> Vec<f64> {
        let d = self.d as f64;
        let mut y: Vec<f64> = x.iter().map(|v| v / d).collect();
        y[radial_axis] = (x[radial_axis] - self.log_lambda) / d;
        y
    }

    /// Radius `λ r^d` of the image of the sphere `S(r)`.
    pub fn radial_image(&self, r: f64) -> f64 {
        (self.d as f64 * r.ln() + self.log_lambda).exp()
    }

    /// Radius `(r/λ)^{1/d}` of the preimage of `S(r)`.
    pub fn radial_preimage(&self, r: f64) -> f64 {
        ((r.ln() - self.log_lambda) / self.d as f64).exp()
    }
}

/// Radius `λ^{1/(1−d)}` of the Julia sphere of `f_{d,λ}`.
pub fn julia_radius(p: &StretchParams) -> Result<f64> {
    if p.d < 2 {
        return Err(Error::invalid(format!(
            "Julia sphere needs d ≥ 2, got {}",
            p.d
        )));
    }
    Ok((p.log_lambda / (1 - p.d) as f64).exp())
}

/// Same as [`julia_radius`] but in log space: `ln λ / (1 − d)`.
pub fn log_julia_radius(p: &StretchParams) -> Result<f64> {
    julia_radius(p).map(|_| p.log_lambda / (1 - p.d) as f64)
}

/// Tolerance for the relative branch-independence defect checked at
/// construction. Rounding in the folding step grows linearly with `|d|`.
fn branch_tolerance(d: i64) -> f64 {
    1e-9 * (d.unsigned_abs() as f64 * 1e-4).max(1.0)
}

/// The uqr map `f_{d,λ}` solving the Schröder equation for a Zorich map `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerMap {
    params: StretchParams,
    h: ZorichMap,
}

impl PowerMap {
    /// Builds the map and checks that it is single-valued on a fixed set of
    /// sample points.
    pub fn new(params: StretchParams, h: ZorichMap) -> Result<Self> {
        let f = PowerMap { params, h };
        for y in validation_points(h.dim()) {
            let scale = norm(&f.eval_coords(&y)).max(f64::MIN_POSITIVE);
            let defect = f.branch_independence_defect_coords(&y)?;
            if !(defect / scale < branch_tolerance(params.d)) {
                return Err(Error::ConstructionFailed(format!(
                    "f_{{{}, e^{}}} depends on the branch of h⁻¹ (relative defect {:e})",
                    params.d,
                    params.log_lambda,
                    defect / scale
                )));
            }
        }
        Ok(f)
    }

    pub fn with_lambda(d: i64, lambda: f64, h: ZorichMap) -> Result<Self> {
        PowerMap::new(StretchParams::from_lambda(d, lambda)?, h)
    }

    pub fn params(&self) -> &StretchParams {
        &self.params
    }

    pub fn zorich(&self) -> &ZorichMap {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Topological degree `|d|^{n−1}`.
    pub fn degree(&self) -> u64 {
        self.params.d.unsigned_abs().pow(self.h.dim() as u32 - 1)
    }

    /// `f(y) = h(A(h⁻¹(y)))` via the principal branch. `0` and `∞` are fixed
    /// for `d ≥ 2` and exchanged for `d ≤ −2`.
    pub fn eval(&self, y: &SpherePoint) -> SpherePoint {
        let positive = self.params.d > 0;
        match y {
            SpherePoint::Infinity => {
                if positive {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::origin(self.dim())
                }
            }
            SpherePoint::Finite(c) if c.iter().all(|&v| v == 0.0) => {
                if positive {
                    y.clone()
                } else {
                    SpherePoint::Infinity
                }
            }
            SpherePoint::Finite(c) => SpherePoint::from_raw(self.eval_coords(c)),
        }
    }

    /// Evaluation on a finite nonzero point. Overflowing images come back
    /// with infinite coordinates.
    pub fn eval_coords(&self, y: &[f64]) -> Vec<f64> {
        let x = self
            .h
            .inverse_coords(y, BranchIndex::PRINCIPAL)
            .expect("eval_coords needs a finite nonzero point");
        self.h.eval(&self.params.apply(&x, self.h.radial_axis()))
    }

    /// Largest pairwise distance between the values `h(A(x_b))` over a
    /// fundamental set of branches `x_b ∈ h⁻¹(y)`.
    pub fn branch_independence_defect(&self, y: &SpherePoint) -> Result<f64> {
        match y {
            SpherePoint::Finite(c) => self.branch_independence_defect_coords(c),
            SpherePoint::Infinity => Err(Error::Domain("defect undefined at infinity".into())),
        }
    }

    fn branch_independence_defect_coords(&self, y: &[f64]) -> Result<f64> {
        let values = self
            .h
            .fundamental_branches()
            .into_iter()
            .map(|b| {
                self.h
                    .inverse_coords(y, b)
                    .map(|x| self.h.eval(&self.params.apply(&x, self.h.radial_axis())))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut worst: f64 = 0.0;
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                worst = worst.max(dist(a, b));
            }
        }
        Ok(worst)
    }

    /// All solutions of `f(x) = y`: `h(A⁻¹(x_y + t))` with `t` ranging over
    /// the even lattice modulo `d` (`|d|^{n−1}` points). Near-duplicates
    /// within 1e-9 are merged.
    pub fn preimages(&self, y: &SpherePoint) -> Result<Vec<SpherePoint>> {
        let c = match y {
            SpherePoint::Finite(c) if norm(c) > 0.0 => c,
            _ => {
                return Err(Error::Domain(
                    "preimages are enumerated away from 0 and infinity".into(),
                ))
            }
        };
        let base = self.h.inverse_coords(c, BranchIndex::PRINCIPAL)?;
        let k = self.params.d.unsigned_abs() as i64;
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(self.degree() as usize);
        let mut push = |x: Vec<f64>| {
            let p = self.h.eval(&self.params.apply_inverse(&x, self.h.radial_axis()));
            if !out.iter().any(|q| dist(q, &p) < 1e-9) {
                out.push(p);
            }
        };
        match self.h.dim() {
            2 => {
                for m in 0..k {
                    let b = self.h.branch_motion(BranchIndex::new(m, 0, 0));
                    push(self.h.apply_motion(&b, &base));
                }
            }
            _ => {
                for m1 in 0..k {
                    for m2 in 0..k {
                        let b = self.h.branch_motion(BranchIndex::new(m1, m2, 0));
                        push(self.h.apply_motion(&b, &base));
                    }
                }
            }
        }
        Ok(out.into_iter().map(SpherePoint::Finite).collect())
    }
}

fn validation_points(dim: usize) -> Vec<Vec<f64>> {
    let dirs3: [[f64; 3]; 6] = [
        [0.3, -0.5, 0.81],
        [-0.7, 0.2, -0.4],
        [0.05, 0.9, 0.1],
        [0.6, 0.6, -0.52],
        [-0.33, -0.71, 0.62],
        [0.99, -0.02, 0.0],
    ];
    let radii = [0.37, 1.0, 2.9];
    let mut out = Vec::new();
    for (i, r) in radii.iter().enumerate() {
        for (j, d) in dirs3.iter().enumerate() {
            let v: Vec<f64> = if dim == 2 {
                let a = 0.7 * (i * 6 + j) as f64 + 0.1;
                vec![a.cos(), a.sin()]
            } else {
                d.to_vec()
            };
            let s = r / norm(&v);
            out.push(v.iter().map(|c| c * s).collect());
        }
    }
    out
}
