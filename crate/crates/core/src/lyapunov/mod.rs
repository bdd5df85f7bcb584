//! Ψ-type Lyapunov functionals, their classical and Caputo derivatives, and
//! numerical certificates for the fractional inequality and for decrescence.

mod certificate;
mod functional;
mod gfunction;

pub use certificate::{
    decrescence_certificate, default_tolerance, lemma_certificate, lemma_certificate_with_tolerance, lemma_sides,
    Certificate, CertificateKind, GridInfo,
};
pub use functional::{
    build_log_volterra, caputo_of_functional, psi, CrossQuadComponent, LyapunovFunctional, PsiComponent, QuadComponent,
    PSI_MIN_ARGUMENT, PSI_QUADRATURE_TOL,
};
pub use gfunction::{GFunction, ADMISSIBILITY_SAMPLES};
