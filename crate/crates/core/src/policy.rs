//! Numeric tolerances shared by every module.

/// Central tolerance record. Every structural check, PSD test and
/// conditioning guard in the crate reads its threshold from here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Hermiticity, orthonormality and round-trip checks.
    pub structural: f64,
    /// Slack on negative eigenvalues before a matrix stops counting as PSD.
    pub psd_slack: f64,
    /// Allowed deviation of a density operator's trace from one.
    pub trace: f64,
    /// First-row check for transfer matrices read from files.
    pub file_trace_preservation: f64,
    /// First-row check for transfer matrices built in memory.
    pub trace_preservation: f64,
    /// Largest condition number accepted when inverting a process.
    pub max_condition: f64,
    /// Finite-difference g(t) values at or below this are rounding noise
    /// and reported as zero.
    pub rate_floor: f64,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        structural: 1e-12,
        psd_slack: 1e-10,
        trace: 1e-10,
        file_trace_preservation: 1e-8,
        trace_preservation: 1e-10,
        max_condition: 1e12,
        rate_floor: 1e-8,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Shorthand for the default policy.
pub const POLICY: NumericPolicy = NumericPolicy::DEFAULT;
