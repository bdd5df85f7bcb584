//! SICA: susceptible, infected, under treatment (C) and AIDS (A).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lyapunov::{build_log_volterra, LyapunovFunctional};
use crate::newton::{damped_newton, spectral_abscissa, NewtonOptions};
use crate::solver::ModelDefinition;

use super::relative_residual;

/// Transmission term: `β S I` or `β S I / N` with `N = S + I + C + A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Incidence {
    MassAction,
    #[default]
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SicaParams {
    /// Recruitment Λ.
    #[serde(rename = "lambda_", alias = "Lambda")]
    pub lambda: f64,
    pub mu: f64,
    pub beta: f64,
    /// I → A.
    pub rho: f64,
    /// I → C.
    pub phi: f64,
    /// A → I.
    pub alpha_t: f64,
    /// C → I.
    pub omega: f64,
    /// AIDS-induced death.
    pub d: f64,
    #[serde(default)]
    pub incidence: Incidence,
}

pub const STATE_LABELS: [&str; 4] = ["S", "I", "C", "A"];

impl SicaParams {
    /// Disease-free scenario: Λ = 10724, μ = 1/69.54, β = 0.066, standard incidence.
    pub fn baseline() -> Self {
        SicaParams {
            lambda: 10724.0,
            mu: 1.0 / 69.54,
            beta: 0.066,
            rho: 0.1,
            phi: 1.0,
            alpha_t: 0.33,
            omega: 0.09,
            d: 1.0,
            incidence: Incidence::Standard,
        }
    }

    /// Baseline with β = 0.866, the endemic scenario.
    pub fn endemic_scenario() -> Self {
        SicaParams {
            beta: 0.866,
            ..Self::baseline()
        }
    }

    pub fn xi1(&self) -> f64 {
        self.alpha_t + self.mu + self.d
    }

    pub fn xi2(&self) -> f64 {
        self.omega + self.mu
    }

    /// `𝒩 = μ[ξ₂(ρ+ξ₁) + ξ₁φ + ρd] + ρωd`.
    pub fn n_const(&self) -> f64 {
        let (x1, x2) = (self.xi1(), self.xi2());
        self.mu * (x2 * (self.rho + x1) + x1 * self.phi + self.rho * self.d) + self.rho * self.omega * self.d
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("lambda_", self.lambda),
            ("mu", self.mu),
            ("beta", self.beta),
            ("rho", self.rho),
            ("phi", self.phi),
            ("alpha_t", self.alpha_t),
            ("omega", self.omega),
            ("d", self.d),
        ];
        for (name, v) in rates {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Params(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `R₀ = β ξ₁ ξ₂ / 𝒩`, independent of the incidence switch.
    pub fn r0(&self) -> f64 {
        self.beta * self.xi1() * self.xi2() / self.n_const()
    }

    /// Reproduction number that actually governs the configured incidence:
    /// equal to [`Self::r0`] for standard incidence and `S₀ R₀` for mass action.
    pub fn threshold(&self) -> f64 {
        match self.incidence {
            Incidence::Standard => self.r0(),
            Incidence::MassAction => self.r0() * self.s0(),
        }
    }

    pub fn s0(&self) -> f64 {
        self.lambda / self.mu
    }

    pub fn disease_free(&self) -> [f64; 4] {
        [self.s0(), 0.0, 0.0, 0.0]
    }

    fn incidence_terms(&self, s: &[f64]) -> Result<(f64, [f64; 4])> {
        let (sv, iv) = (s[0], s[1]);
        match self.incidence {
            Incidence::MassAction => Ok((self.beta * sv * iv, [self.beta * iv, self.beta * sv, 0.0, 0.0])),
            Incidence::Standard => {
                let n: f64 = s.iter().sum();
                if n == 0.0 {
                    return Err(Error::domain("standard incidence at zero total population"));
                }
                let inc = self.beta * sv * iv / n;
                let n2 = n * n;
                let cross = -self.beta * sv * iv / n2;
                Ok((
                    inc,
                    [
                        self.beta * iv * (n - sv) / n2,
                        self.beta * sv * (n - iv) / n2,
                        cross,
                        cross,
                    ],
                ))
            }
        }
    }

    /// The four-component field.
    pub fn rhs(&self, state: &[f64]) -> Result<[f64; 4]> {
        if state.len() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                got: state.len(),
            });
        }
        let (inc, _) = self.incidence_terms(state)?;
        let [s, i, c, a] = [state[0], state[1], state[2], state[3]];
        Ok([
            self.lambda - self.mu * s - inc,
            inc - (self.rho + self.phi + self.mu) * i + self.alpha_t * a + self.omega * c,
            self.phi * i - self.xi2() * c,
            self.rho * i - self.xi1() * a,
        ])
    }

    pub fn jacobian(&self, state: &[f64]) -> Result<DMatrix<f64>> {
        let (_, dinc) = self.incidence_terms(state)?;
        let mut j = DMatrix::zeros(4, 4);
        for c in 0..4 {
            j[(0, c)] = -dinc[c];
            j[(1, c)] = dinc[c];
        }
        j[(0, 0)] -= self.mu;
        j[(1, 1)] -= self.rho + self.phi + self.mu;
        j[(1, 2)] += self.omega;
        j[(1, 3)] += self.alpha_t;
        j[(2, 1)] = self.phi;
        j[(2, 2)] = -self.xi2();
        j[(3, 1)] = self.rho;
        j[(3, 3)] = -self.xi1();
        Ok(j)
    }

    /// Largest real part of the infected-subsystem (I, C, A) Jacobian at `E_f`;
    /// negative exactly when the disease-free point is linearly stable.
    pub fn disease_free_abscissa(&self) -> Result<f64> {
        let j = self.jacobian(&self.disease_free())?;
        Ok(spectral_abscissa(&j.view((1, 1), (3, 3)).into_owned()))
    }

    /// Endemic equilibrium by damped Newton, seeded from the closed-form
    /// relations `C = φI/ξ₂`, `A = ρI/ξ₁` and the S–I balance.
    pub fn endemic(&self) -> Result<[f64; 4]> {
        let thr = self.threshold();
        if !(thr > 1.0) {
            return Err(Error::NoEndemicEquilibrium { r0: thr });
        }
        let (x1, x2) = (self.xi1(), self.xi2());
        // effective removal rate of I once C and A are slaved to it
        let m = self.n_const() / (x1 * x2);
        let kappa = 1.0 + self.phi / x2 + self.rho / x1;
        let (s, i) = match self.incidence {
            Incidence::Standard => {
                let s = self.lambda / (self.mu + m * (thr - 1.0) / kappa);
                (s, s * (thr - 1.0) / kappa)
            }
            Incidence::MassAction => {
                let s = m / self.beta;
                (s, (self.lambda - self.mu * s) / m)
            }
        };
        let seed = [s, i, self.phi * i / x2, self.rho * i / x1];
        let sol = damped_newton(
            |x| self.rhs(x).map(|r| r.to_vec()),
            |x| self.jacobian(x),
            &seed,
            NewtonOptions::default(),
        )?;
        let eq = [sol[0], sol[1], sol[2], sol[3]];
        let res = relative_residual(|x| self.rhs(x).map(|r| r.to_vec()), &eq)?;
        if res > 1e-9 || eq.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NewtonFailed {
                iterations: NewtonOptions::default().max_iterations,
                residual: res,
            });
        }
        Ok(eq)
    }

    /// `V₁ = Ψ(S) + Ψ(I) + (ω/ξ₂)Ψ(C) + (αₜ/ξ₁)Ψ(A)`, log form anchored at `E*`.
    pub fn v1(&self) -> Result<LyapunovFunctional<f64>> {
        let e = self.endemic()?;
        build_log_volterra(&[
            (1.0, e[0]),
            (1.0, e[1]),
            (self.omega / self.xi2(), e[2]),
            (self.alpha_t / self.xi1(), e[3]),
        ])
    }

    /// `V₀ = Ψ(S) + I + (ω/ξ₂)C + (αₜ/ξ₁)A`, anchored at `E_f`.
    pub fn v0(&self) -> Result<LyapunovFunctional<f64>> {
        build_log_volterra(&[
            (1.0, self.s0()),
            (1.0, 0.0),
            (self.omega / self.xi2(), 0.0),
            (self.alpha_t / self.xi1(), 0.0),
        ])
    }
}

impl ModelDefinition<f64> for SicaParams {
    fn name(&self) -> &str {
        "sica"
    }

    fn state_labels(&self) -> Vec<String> {
        STATE_LABELS.iter().map(|s| s.to_string()).collect()
    }

    fn dimension(&self) -> usize {
        4
    }

    fn rhs(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(&SicaParams::rhs(self, state)?);
        Ok(())
    }
}
