//! Physical constants (SI, CODATA 2018).

/// Planck constant, J s.
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const BOLTZMANN_KB: f64 = 1.380_649e-23;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Magnetic flux quantum h/2e, Wb.
pub const FLUX_QUANTUM: f64 = PLANCK_H / (2.0 * ELEMENTARY_CHARGE);

/// One micro-electronvolt in joules.
pub const MICRO_EV: f64 = 1e-6 * ELEMENTARY_CHARGE;
