//! Low-energy resonance analysis of single partial-wave phase series:
//! background-plus-resonance fits, Wigner time delay, threshold power laws
//! and unitarity peaks. Energies are Hartree, times atomic units
//! (`hbar = 1`); CSV input and output use microkelvin.

mod delay;
mod fit;
mod series;

pub use delay::{
    derivative, detect_unitarity_peaks, threshold_exponent, time_delay, PowerLaw, TimeDelay,
    UnitarityPeak, RESOLVED_PHASE_STEP,
};
pub use fit::{
    classify, fit_breit_wigner, is_rapid, Classification, ResonanceFit, ResonanceModel,
    MARGINAL_BAND, RAPID_RATIO,
};
pub use series::PhaseSeries;
