/// Numerical thresholds used across the crate, kept in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed drift of `Σ|a|²` from 1.
    pub norm: f64,
    /// Minimum `|⟨ψ|T|ψ⟩|` deficit accepted as translation symmetric.
    pub symmetry: f64,
    /// Residual `‖Hv - Ev‖` required of a ground state.
    pub ground_residual: f64,
    /// Energy gap below which two levels count as degenerate.
    pub degeneracy: f64,
    /// Norm below which a symmetrized random vector is redrawn.
    pub resample_norm: f64,
}

pub const TOL: Tolerances = Tolerances {
    norm: 1e-10,
    symmetry: 1e-8,
    ground_residual: 1e-8,
    degeneracy: 1e-10,
    resample_norm: 1e-8,
};
