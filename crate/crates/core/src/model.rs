//! Shared domain types: detection events, acquisition runs, and the physical
//! parameter sets of source, receiver, channel, and security analysis.
//!
//! All types are immutable value objects after construction and safe to share
//! across workers. Times are integer picoseconds throughout; rates and
//! probabilities are floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Smallest legal acceptance-window width, set by the temporal resolution of
/// the detection chain (detector response convolved with the time tagger).
pub const DT_MIN_PS: u64 = 90;

/// One of the four BB84 polarization states, doubling as the index of the
/// detection channel that registers it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H = 0,
    V = 1,
    D = 2,
    A = 3,
}

/// The two conjugate measurement bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Rectilinear,
    Diagonal,
}

impl Polarization {
    pub const ALL: [Polarization; 4] = [Polarization::H, Polarization::V, Polarization::D, Polarization::A];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: u16) -> Result<Self> {
        match i {
            0 => Ok(Polarization::H),
            1 => Ok(Polarization::V),
            2 => Ok(Polarization::D),
            3 => Ok(Polarization::A),
            other => Err(Error::Validation(format!("channel index {other} out of range 0..=3"))),
        }
    }

    pub fn from_letter(s: &str) -> Result<Self> {
        match s.trim() {
            "H" | "h" => Ok(Polarization::H),
            "V" | "v" => Ok(Polarization::V),
            "D" | "d" => Ok(Polarization::D),
            "A" | "a" => Ok(Polarization::A),
            other => Err(Error::Validation(format!("unknown polarization {other:?}"))),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
            Polarization::D => 'D',
            Polarization::A => 'A',
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            Polarization::H | Polarization::V => Basis::Rectilinear,
            Polarization::D | Polarization::A => Basis::Diagonal,
        }
    }

    /// The orthogonal state in the same basis, i.e. the "wrong" detector for
    /// this input.
    pub fn partner(self) -> Polarization {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
            Polarization::D => Polarization::A,
            Polarization::A => Polarization::D,
        }
    }

    /// The two channels of the conjugate basis.
    pub fn conjugates(self) -> [Polarization; 2] {
        match self.basis() {
            Basis::Rectilinear => [Polarization::D, Polarization::A],
            Basis::Diagonal => [Polarization::H, Polarization::V],
        }
    }
}

/// A single timestamped detection event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeTag {
    /// Picoseconds since the start of the run.
    pub time_ps: u64,
    /// Detection channel that clicked.
    pub channel: Polarization,
    /// Reserved; round-trips through the binary format untouched.
    pub flags: u16,
}

impl TimeTag {
    pub fn new(time_ps: u64, channel: Polarization) -> Self {
        TimeTag { time_ps, channel, flags: 0 }
    }
}

/// A labeled acquisition: the ordered tag stream of one measurement run
/// together with the pulse-train geometry it was recorded against.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Polarization state prepared at the transmitter for this run.
    pub input_polarization: Polarization,
    /// Time-ordered detection events.
    pub tags: Vec<TimeTag>,
    /// Wall-clock length of the acquisition in seconds.
    pub duration_s: f64,
    /// Excitation pulse period in picoseconds.
    pub t_rep_ps: u64,
    /// Phase of the pulse train relative to the tag clock, in [0, t_rep).
    pub phase_t0_ps: u64,
}

impl RunRecord {
    pub fn new(
        input_polarization: Polarization,
        tags: Vec<TimeTag>,
        duration_s: f64,
        t_rep_ps: u64,
        phase_t0_ps: u64,
    ) -> Result<Self> {
        let run = RunRecord { input_polarization, tags, duration_s, t_rep_ps, phase_t0_ps };
        run.validate()?;
        Ok(run)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_rep_ps == 0 {
            return Err(Error::Validation("t_rep_ps must be positive".into()));
        }
        if self.phase_t0_ps >= self.t_rep_ps {
            return Err(Error::Validation(format!(
                "phase_t0_ps {} outside [0, t_rep {})",
                self.phase_t0_ps, self.t_rep_ps
            )));
        }
        if !(self.duration_s.is_finite() && self.duration_s >= 0.0) {
            return Err(Error::Validation("duration_s must be finite and non-negative".into()));
        }
        let limit = self.duration_s * 1e12;
        let mut last = 0u64;
        for (i, tag) in self.tags.iter().enumerate() {
            if tag.time_ps < last {
                return Err(Error::Validation(format!("tag {i} out of order ({} after {last})", tag.time_ps)));
            }
            if tag.time_ps as f64 > limit {
                return Err(Error::Validation(format!(
                    "tag {i} at {} ps exceeds run duration {} s",
                    tag.time_ps, self.duration_s
                )));
            }
            last = tag.time_ps;
        }
        Ok(())
    }

    /// Per-channel tag counts.
    pub fn channel_counts(&self) -> [u64; 4] {
        let mut counts = [0u64; 4];
        for tag in &self.tags {
            counts[tag.channel.index()] += 1;
        }
        counts
    }

    /// Mean detected rate over the run, in Hz.
    pub fn detected_rate_hz(&self) -> f64 {
        if self.duration_s <= 0.0 {
            return 0.0;
        }
        self.tags.len() as f64 / self.duration_s
    }
}

/// Photon-number and timing statistics of the source as coupled into the
/// quantum channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceParams<R = f64> {
    /// Mean photon number per pulse into the channel.
    pub mu: R,
    /// Unfiltered second-order autocorrelation at zero delay.
    pub g2_zero: R,
    /// Excitation pulse period in picoseconds.
    pub t_rep_ps: u64,
    /// Emitter decay constant in picoseconds.
    pub lifetime_ps: R,
    /// Gaussian instrument-response standard deviation in picoseconds.
    pub irf_sigma_ps: R,
    /// Mean dwell time of the emitting ("on") state, nanoseconds.
    pub tau_on_ns: R,
    /// Mean dwell time of the dark ("off") state, nanoseconds.
    pub tau_off_ns: R,
}

impl<R: Real> SourceParams<R> {
    pub fn validate(&self) -> Result<()> {
        let zero = R::zero();
        let one = R::one();
        if !(self.mu >= zero && self.mu <= one) {
            return Err(Error::Validation("mu must lie in [0, 1]".into()));
        }
        if !(self.g2_zero >= zero) {
            return Err(Error::Validation("g2_zero must be non-negative".into()));
        }
        if self.t_rep_ps == 0 {
            return Err(Error::Validation("t_rep_ps must be positive".into()));
        }
        if !(self.lifetime_ps > zero) {
            return Err(Error::Validation("lifetime_ps must be positive".into()));
        }
        if !(self.irf_sigma_ps >= zero) {
            return Err(Error::Validation("irf_sigma_ps must be non-negative".into()));
        }
        if !(self.tau_on_ns > zero && self.tau_off_ns > zero) {
            return Err(Error::Validation("blinking dwell times must be positive".into()));
        }
        // Two-photon probability cannot exceed the total emission probability.
        let two = R::of(2.0);
        if self.mu * self.mu * self.g2_zero / two > self.mu {
            return Err(Error::Validation("mu^2 * g2_zero / 2 exceeds mu".into()));
        }
        Ok(())
    }

    /// Pulse repetition rate in Hz, always derived from the period.
    pub fn clock_hz(&self) -> R {
        R::of(1e12) / R::of(self.t_rep_ps as f64)
    }

    /// Long-run fraction of time the emitter spends in the "on" state.
    pub fn duty(&self) -> R {
        self.tau_on_ns / (self.tau_on_ns + self.tau_off_ns)
    }
}

/// Receiver transmission, noise, and imperfection parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverParams<R = f64> {
    /// Receiver transmission including detector efficiency, linear.
    pub eta_bob: R,
    /// Per-channel dark/stray rate in Hz, indexed H, V, D, A.
    pub dark_rate_hz: [R; 4],
    /// Per-input-state optical error probability, indexed H, V, D, A.
    pub e_opt: [R; 4],
    /// Relative per-channel detection efficiency, indexed H, V, D, A.
    pub channel_efficiency: [R; 4],
}

impl<R: Real> ReceiverParams<R> {
    pub fn validate(&self) -> Result<()> {
        let zero = R::zero();
        let one = R::one();
        if !(self.eta_bob > zero && self.eta_bob <= one) {
            return Err(Error::Validation("eta_bob must lie in (0, 1]".into()));
        }
        for (i, &d) in self.dark_rate_hz.iter().enumerate() {
            if !(d >= zero) {
                return Err(Error::Validation(format!("dark_rate_hz[{i}] must be non-negative")));
            }
        }
        for (i, &e) in self.e_opt.iter().enumerate() {
            if !(e >= zero && e < R::of(0.5)) {
                return Err(Error::Validation(format!("e_opt[{i}] must lie in [0, 0.5)")));
            }
        }
        for (i, &c) in self.channel_efficiency.iter().enumerate() {
            if !(c >= zero && c <= one) {
                return Err(Error::Validation(format!("channel_efficiency[{i}] must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Total dark rate summed over the four channels, Hz.
    pub fn dark_rate_total_hz(&self) -> R {
        self.dark_rate_hz.iter().copied().sum()
    }

    /// Per-pulse dark-click probability over the full repetition period.
    pub fn p_dc_full(&self, t_rep_ps: u64) -> R {
        self.dark_rate_total_hz() * R::of(t_rep_ps as f64 * 1e-12)
    }
}

/// Quantum-channel loss model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel<R = f64> {
    /// Total channel loss in dB.
    pub loss_db: R,
    /// Fiber attenuation in dB/km at the operating wavelength.
    pub attenuation_db_per_km: R,
    /// Nominal wavelength in nm (informational).
    pub wavelength_nm: R,
}

impl<R: Real> ChannelModel<R> {
    pub fn validate(&self) -> Result<()> {
        if !(self.loss_db >= R::zero()) {
            return Err(Error::Validation("loss_db must be non-negative".into()));
        }
        if !(self.attenuation_db_per_km > R::zero()) {
            return Err(Error::Validation("attenuation_db_per_km must be positive".into()));
        }
        Ok(())
    }
}

/// Error-correction efficiency and composable-security failure probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityParams<R = f64> {
    /// Error-correction inefficiency relative to the Shannon limit.
    pub f_ec: R,
    /// Failure probability of parameter estimation.
    pub eps_pe: R,
    /// Failure probability of error correction.
    pub eps_ec: R,
    /// Failure probability of privacy amplification.
    pub eps_pa: R,
    /// Failure probability of the smooth-entropy estimation.
    pub eps_smooth: R,
    /// Fraction of sifted bits consumed by parameter estimation.
    pub q_pe: R,
}

impl<R: Real> SecurityParams<R> {
    pub fn validate(&self) -> Result<()> {
        let zero = R::zero();
        let one = R::one();
        if !(self.f_ec >= one) {
            return Err(Error::Validation("f_ec must be >= 1".into()));
        }
        for (name, eps) in [
            ("eps_pe", self.eps_pe),
            ("eps_ec", self.eps_ec),
            ("eps_pa", self.eps_pa),
            ("eps_smooth", self.eps_smooth),
        ] {
            if !(eps > zero && eps < one) {
                return Err(Error::Validation(format!("{name} must lie in (0, 1)")));
            }
        }
        let total = self.eps_pe + self.eps_ec + self.eps_pa + self.eps_smooth;
        if !(total < one) {
            return Err(Error::Validation("overall security parameter must be < 1".into()));
        }
        if !(self.q_pe > zero && self.q_pe < one) {
            return Err(Error::Validation("q_pe must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Overall security parameter: the sum of the four failure probabilities.
    pub fn eps_total(&self) -> R {
        self.eps_pe + self.eps_ec + self.eps_pa + self.eps_smooth
    }
}

impl<R: Real> Default for SecurityParams<R> {
    fn default() -> Self {
        SecurityParams {
            f_ec: R::of(1.16),
            eps_pe: R::of(1e-9),
            eps_ec: R::of(1e-9),
            eps_pa: R::of(1e-9),
            eps_smooth: R::of(1e-9),
            q_pe: R::of(0.5),
        }
    }
}

/// A temporal acceptance filter in pulse-relative time: center and width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceWindow {
    /// Window center in pulse-relative picoseconds, in [0, t_rep).
    pub t_c_ps: u64,
    /// Window width in picoseconds.
    pub dt_ps: u64,
}

impl AcceptanceWindow {
    pub fn new(t_c_ps: u64, dt_ps: u64) -> Self {
        AcceptanceWindow { t_c_ps, dt_ps }
    }

    pub fn validate(&self, t_rep_ps: u64) -> Result<()> {
        if self.dt_ps < DT_MIN_PS {
            return Err(Error::Validation(format!(
                "window width {} ps below the {} ps lower limit",
                self.dt_ps, DT_MIN_PS
            )));
        }
        if self.dt_ps > t_rep_ps {
            return Err(Error::Validation(format!(
                "window width {} ps exceeds repetition period {} ps",
                self.dt_ps, t_rep_ps
            )));
        }
        if self.t_c_ps >= t_rep_ps {
            return Err(Error::Validation(format!(
                "window center {} ps outside [0, t_rep {})",
                self.t_c_ps, t_rep_ps
            )));
        }
        Ok(())
    }

    /// True when the window spans the entire repetition period.
    pub fn is_full_period(&self, t_rep_ps: u64) -> bool {
        self.dt_ps >= t_rep_ps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source() -> SourceParams {
        SourceParams {
            mu: 0.0002,
            g2_zero: 0.10,
            t_rep_ps: 12_490,
            lifetime_ps: 900.0,
            irf_sigma_ps: 50.0,
            tau_on_ns: 482.3,
            tau_off_ns: 275.1,
        }
    }

    #[test]
    fn source_validation_accepts_testbed_parameters() {
        source().validate().unwrap();
    }

    #[test]
    fn source_validation_rejects_excess_two_photon_weight() {
        let mut s = source();
        s.mu = 0.9;
        s.g2_zero = 3.0;
        assert!(matches!(s.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn duty_matches_dwell_ratio() {
        let d = source().duty();
        assert!((d - 0.6367837338262477).abs() < 1e-12);
    }

    #[test]
    fn clock_is_derived_from_period() {
        let s = source();
        assert!((s.clock_hz() - 1e12 / 12_490.0).abs() < 1e-3);
    }

    #[test]
    fn run_validation_rejects_unsorted_tags() {
        let tags = vec![TimeTag::new(200, Polarization::H), TimeTag::new(100, Polarization::V)];
        let err = RunRecord::new(Polarization::H, tags, 1.0, 12_490, 0).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn run_validation_rejects_tags_past_duration() {
        let tags = vec![TimeTag::new(2_000_000_000_000, Polarization::H)];
        let err = RunRecord::new(Polarization::H, tags, 1.0, 12_490, 0).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn window_limits() {
        assert!(AcceptanceWindow::new(0, 89).validate(12_490).is_err());
        assert!(AcceptanceWindow::new(0, 90).validate(12_490).is_ok());
        assert!(AcceptanceWindow::new(0, 12_490).validate(12_490).is_ok());
        assert!(AcceptanceWindow::new(0, 12_491).validate(12_490).is_err());
        assert!(AcceptanceWindow::new(12_490, 500).validate(12_490).is_err());
    }

    #[test]
    fn polarization_roundtrip_and_geometry() {
        for p in Polarization::ALL {
            assert_eq!(Polarization::from_index(p.index() as u16).unwrap(), p);
            assert_eq!(p.partner().partner(), p);
            assert_ne!(p.basis(), p.conjugates()[0].basis());
        }
        assert_eq!(Polarization::from_letter("d").unwrap(), Polarization::D);
    }

    #[test]
    fn security_defaults_validate() {
        SecurityParams::<f64>::default().validate().unwrap();
        SecurityParams::<f32>::default().validate().unwrap();
    }
}
