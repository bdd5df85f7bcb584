//! TEIV: target cells, latently infected (E), productively infected (I) and
//! free virus, with the general incidence `β T / (1 + α₁T + α₂V + α₃TV)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lyapunov::{CrossQuadComponent, GFunction, LyapunovFunctional, PsiComponent};
use crate::newton::{damped_newton, spectral_abscissa, NewtonOptions};
use crate::solver::ModelDefinition;

use super::relative_residual;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeivParams {
    /// Target-cell supply.
    #[serde(alias = "lambda_")]
    pub lambda: f64,
    #[serde(rename = "mu_T")]
    pub mu_t: f64,
    #[serde(rename = "mu_E")]
    pub mu_e: f64,
    #[serde(rename = "mu_I")]
    pub mu_i: f64,
    #[serde(rename = "mu_V")]
    pub mu_v: f64,
    /// Latent reversion E → T.
    pub rho: f64,
    /// Activation E → I.
    pub gamma: f64,
    /// Virions per infected cell.
    pub k: f64,
    pub beta: f64,
    #[serde(default)]
    pub alpha1: f64,
    #[serde(default)]
    pub alpha2: f64,
    #[serde(default)]
    pub alpha3: f64,
}

pub const STATE_LABELS: [&str; 4] = ["T", "E", "I", "V"];

/// Relative residual below which a point is accepted as an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-8;

impl TeivParams {
    /// A chronic-infection parameter set (`R₀ ≈ 2.9`).
    pub fn example() -> Self {
        TeivParams {
            lambda: 10.0,
            mu_t: 0.01,
            mu_e: 0.01,
            mu_i: 0.5,
            mu_v: 3.0,
            rho: 0.01,
            gamma: 0.4,
            k: 100.0,
            beta: 9.2e-5,
            alpha1: 1e-3,
            alpha2: 1e-3,
            alpha3: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("mu_T", self.mu_t),
            ("mu_E", self.mu_e),
            ("mu_I", self.mu_i),
            ("mu_V", self.mu_v),
            ("gamma", self.gamma),
            ("k", self.k),
            ("beta", self.beta),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Params(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [
            ("rho", self.rho),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Params(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Total outflow rate of latently infected cells.
    fn w(&self) -> f64 {
        self.rho + self.mu_e + self.gamma
    }

    fn denom(&self, t: f64, v: f64) -> f64 {
        1.0 + self.alpha1 * t + self.alpha2 * v + self.alpha3 * t * v
    }

    /// `f(T, V) = β T / (1 + α₁T + α₂V + α₃TV)`; infection flux is `f(T, V) V`.
    pub fn incidence(&self, t: f64, v: f64) -> f64 {
        self.beta * t / self.denom(t, v)
    }

    pub fn rhs(&self, state: &[f64]) -> Result<[f64; 4]> {
        if state.len() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                got: state.len(),
            });
        }
        let [t, e, i, v] = [state[0], state[1], state[2], state[3]];
        let flux = self.incidence(t, v) * v;
        Ok([
            self.lambda - self.mu_t * t - flux + self.rho * e,
            flux - self.w() * e,
            self.gamma * e - self.mu_i * i,
            self.k * i - self.mu_v * v,
        ])
    }

    pub fn jacobian(&self, state: &[f64]) -> Result<DMatrix<f64>> {
        if state.len() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                got: state.len(),
            });
        }
        let (t, v) = (state[0], state[3]);
        let d = self.denom(t, v);
        let d2 = d * d;
        let dt = self.beta * v * (1.0 + self.alpha2 * v) / d2;
        let dv = self.beta * t * (1.0 + self.alpha1 * t) / d2;
        #[rustfmt::skip]
        let j = DMatrix::from_row_slice(4, 4, &[
            -self.mu_t - dt, self.rho, 0.0, -dv,
            dt, -self.w(), 0.0, dv,
            0.0, self.gamma, -self.mu_i, 0.0,
            0.0, 0.0, self.k, -self.mu_v,
        ]);
        Ok(j)
    }

    pub fn r0(&self) -> f64 {
        self.lambda * self.beta * self.k * self.gamma
            / (self.mu_i * self.mu_v * (self.lambda * self.alpha1 + self.mu_t) * self.w())
    }

    pub fn infection_free(&self) -> [f64; 4] {
        [self.lambda / self.mu_t, 0.0, 0.0, 0.0]
    }

    /// Largest real part of the (E, I, V) Jacobian block at the infection-free point.
    pub fn infection_free_abscissa(&self) -> Result<f64> {
        let j = self.jacobian(&self.infection_free())?;
        Ok(spectral_abscissa(&j.view((1, 1), (3, 3)).into_owned()))
    }

    /// Infection-free point, followed by the chronic point when `R₀ > 1`.
    pub fn equilibria(&self) -> Result<Vec<[f64; 4]>> {
        let mut out = vec![self.infection_free()];
        if self.r0() > 1.0 {
            out.push(self.chronic()?);
        }
        Ok(out)
    }

    /// Chronic equilibrium. With `E` and `V` slaved to `T` the steady state
    /// reduces to `f(T, V(T)) = w μ_I μ_V / (kγ)`, which is bracketed on
    /// `(0, λ/μ_T)` and bisected before a Newton polish on the full system.
    pub fn chronic(&self) -> Result<[f64; 4]> {
        let r0 = self.r0();
        if !(r0 > 1.0) {
            return Err(Error::NoEndemicEquilibrium { r0 });
        }
        let e_of = |t: f64| (self.lambda - self.mu_t * t) / (self.mu_e + self.gamma);
        let v_of = |t: f64| self.k * self.gamma * e_of(t) / (self.mu_i * self.mu_v);
        let target = self.w() * self.mu_i * self.mu_v / (self.k * self.gamma);
        let gap = |t: f64| self.incidence(t, v_of(t)) - target;
        let (mut lo, mut hi) = (0.0, self.lambda / self.mu_t);
        if !(gap(hi) > 0.0) {
            return Err(Error::NoEndemicEquilibrium { r0 });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let e = e_of(t);
        let seed = [t, e, self.gamma * e / self.mu_i, v_of(t)];
        let field = |x: &[f64]| self.rhs(x).map(|r| r.to_vec());
        let sol = damped_newton(field, |x| self.jacobian(x), &seed, NewtonOptions::default())?;
        let eq = [sol[0], sol[1], sol[2], sol[3]];
        let res = relative_residual(field, &eq)?;
        if res > 1e-9 || eq.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NewtonFailed {
                iterations: NewtonOptions::default().max_iterations,
                residual: res,
            });
        }
        Ok(eq)
    }

    /// Lyapunov functional anchored at an equilibrium `(T̄, Ē, Ī, V̄)`:
    ///
    /// `L = Ψ_g(T) + Ψ(E) + (w/γ)Ψ(I) + (μ_I w/(kγ))Ψ(V) + c (T - T̄ + E - Ē)²`
    ///
    /// with `g(θ) = f(θ, V̄)`, `w = ρ + μ_E + γ` and
    /// `c = ρ(1 + α₂V̄) / (2(1 + α₁T̄ + α₂V̄ + α₃T̄V̄))`. Ψ on E, I, V is the
    /// logarithmic form, linear when the anchor is zero.
    pub fn lyapunov(&self, anchor: &[f64; 4]) -> Result<LyapunovFunctional<f64>> {
        let res = relative_residual(|x| self.rhs(x).map(|r| r.to_vec()), anchor)?;
        if res > EQUILIBRIUM_TOL || anchor.iter().any(|&a| !(a >= 0.0)) {
            return Err(Error::Contract(format!(
                "anchor is not an equilibrium (relative residual {res:.3e})"
            )));
        }
        let [tb, eb, _, vb] = *anchor;
        let w = self.w();
        let this = *self;
        let g = GFunction::new_unchecked(format!("f(s, {vb})"), move |s: f64| this.incidence(s, vb));
        let psi = vec![
            PsiComponent {
                weight: 1.0,
                g,
                anchor: tb,
                index: 0,
            },
            PsiComponent {
                weight: 1.0,
                g: GFunction::identity(),
                anchor: eb,
                index: 1,
            },
            PsiComponent {
                weight: w / self.gamma,
                g: GFunction::identity(),
                anchor: anchor[2],
                index: 2,
            },
            PsiComponent {
                weight: self.mu_i * w / (self.k * self.gamma),
                g: GFunction::identity(),
                anchor: vb,
                index: 3,
            },
        ];
        let c = self.rho * (1.0 + self.alpha2 * vb) / (2.0 * self.denom(tb, vb));
        let cross = vec![CrossQuadComponent {
            weight: c,
            terms: vec![(0, tb), (1, eb)],
        }];
        LyapunovFunctional::new(psi, Vec::new(), cross)
    }
}

impl ModelDefinition<f64> for TeivParams {
    fn name(&self) -> &str {
        "teiv"
    }

    fn state_labels(&self) -> Vec<String> {
        STATE_LABELS.iter().map(|s| s.to_string()).collect()
    }

    fn dimension(&self) -> usize {
        4
    }

    fn rhs(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(&TeivParams::rhs(self, state)?);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lyapunov::psi;
    use crate::newton::finite_difference_jacobian;

    #[test]
    fn example_is_chronic() {
        let p = TeivParams::example();
        p.validate().unwrap();
        assert!(p.r0() > 1.0);
        let eqs = p.equilibria().unwrap();
        assert_eq!(eqs.len(), 2);
        assert!(p.infection_free_abscissa().unwrap() > 0.0);
    }

    fn ones() -> TeivParams {
        TeivParams {
            lambda: 1.0,
            mu_t: 1.0,
            mu_e: 1.0,
            mu_i: 1.0,
            mu_v: 1.0,
            rho: 1.0,
            gamma: 1.0,
            k: 1.0,
            beta: 1.0,
            alpha1: 0.0,
            alpha2: 0.0,
            alpha3: 0.0,
        }
    }

    #[test]
    fn incidence_examples() {
        let p = ones();
        assert_eq!(p.incidence(0.0, 7.0), 0.0);
        assert_eq!(p.incidence(3.0, 5.0), 3.0);
        let sat = TeivParams {
            alpha1: 1.0,
            alpha2: 1.0,
            alpha3: 1.0,
            ..p
        };
        assert_eq!(sat.incidence(1.0, 1.0), 0.25);
    }

    #[test]
    fn hand_evaluated_field() {
        let p = ones();
        assert_eq!(p.rhs(&[1.0; 4]).unwrap(), [0.0, -2.0, 0.0, 0.0]);
        let e = TeivParams::example();
        assert_eq!(e.rhs(&e.infection_free()).unwrap(), [0.0; 4]);
    }

    #[test]
    fn reproduction_number_examples() {
        let p = TeivParams { alpha1: 1.0, ..ones() };
        assert!((p.r0() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(TeivParams { k: 0.0, ..p }.r0(), 0.0);
        assert!((TeivParams { k: 2.0, ..p }.r0() - 2.0 * p.r0()).abs() < 1e-15);
        assert_eq!(p.equilibria().unwrap().len(), 1);
    }

    #[test]
    fn psi_on_target_cells_ignores_scaling_of_f() {
        let p = TeivParams::example();
        let chronic = p.chronic().unwrap();
        let l = p.lyapunov(&chronic).unwrap();
        let g = &l.psi_parts[0].g;
        let tb = chronic[0];
        for c in [1e-3, 0.5, 7.0, 1e4] {
            let scaled = g.scaled(c);
            for x in [0.2 * tb, 1.7 * tb] {
                let a = psi(g, tb, x).unwrap();
                let b = psi(&scaled, tb, x).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs(), "{c}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = TeivParams::example();
        let x = [700.0, 12.0, 9.0, 300.0];
        let fd = finite_difference_jacobian(|s| p.rhs(s).map(|r| r.to_vec()), &x).unwrap();
        let an = p.jacobian(&x).unwrap();
        let scale = an.amax();
        for (a, b) in an.iter().zip(fd.iter()) {
            assert!((a - b).abs() < 1e-6 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn functional_vanishes_at_anchor() {
        let p = TeivParams::example();
        let chronic = p.chronic().unwrap();
        let l = p.lyapunov(&chronic).unwrap();
        assert!(l.eval(&chronic).unwrap().abs() < 1e-12);
        assert!(l.eval(&[chronic[0] * 1.1, chronic[1], chronic[2], chronic[3]]).unwrap() > 0.0);
    }

    #[test]
    fn non_equilibrium_anchor_rejected() {
        let p = TeivParams::example();
        assert!(matches!(p.lyapunov(&[1.0, 1.0, 1.0, 1.0]), Err(Error::Contract(_))));
    }

    #[test]
    fn bilinear_reduction_matches_log_form() {
        let p = TeivParams {
            alpha1: 0.0,
            alpha2: 0.0,
            alpha3: 0.0,
            ..TeivParams::example()
        };
        let chronic = p.chronic().unwrap();
        let l = p.lyapunov(&chronic).unwrap();
        let tb = chronic[0];
        for x in [0.3 * tb, 0.9 * tb, 2.5 * tb] {
            let quad = psi(&l.psi_parts[0].g, tb, x).unwrap();
            let closed = psi(&GFunction::identity(), tb, x).unwrap();
            assert!(
                (quad - closed).abs() < 1e-9 * closed.abs().max(1.0),
                "{quad} vs {closed}"
            );
        }
    }

    #[test]
    fn json_field_names() {
        let json = serde_json::to_string(&TeivParams::example()).unwrap();
        assert!(json.contains(r#""mu_T":0.01"#));
        let back: TeivParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, TeivParams::example());
    }
}
