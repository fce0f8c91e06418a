//! Secret-key-rate budgets: click and error probabilities, the multi-photon
//! bound, the asymptotic rate, finite-size corrections, and the derived
//! sweeps (rate vs. loss, tolerable loss, minimum transmission time).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ReceiverParams, SecurityParams, SourceParams};
use crate::real::Real;
use crate::units::db_to_linear;

/// Acceptance-window summary consumed by the budget: retained signal
/// fraction, dark-count scaling, and the reduced optical error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowMetrics<R> {
    /// Fraction of signal events retained by the window.
    pub fraction: R,
    /// In-window share of the uniform dark counts, dt / t_rep.
    pub dc_scale: R,
    /// Reduced per-click optical error probability inside the window.
    pub e_opt: R,
}

impl<R: Real> WindowMetrics<R> {
    /// The full repetition period: everything retained, errors unchanged.
    pub fn unfiltered(e_opt: R) -> Self {
        WindowMetrics { fraction: R::one(), dc_scale: R::one(), e_opt }
    }
}

/// Per-pulse click and error budget at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<R> {
    /// Per-pulse signal click probability mu * T * eta_bob * F.
    pub p_sig: R,
    /// Per-pulse dark click probability within the window.
    pub p_dc_eff: R,
    /// Total per-pulse click probability.
    pub p_click: R,
    /// Expected QBER of the sifted clicks.
    pub e_expected: R,
    /// Multi-photon emission probability bound (always from the unfiltered
    /// g2(0); see [`multi_photon_bound`]).
    pub p_m: R,
    /// Single-photon detection fraction A = (p_click - p_m) / p_click,
    /// clamped at zero.
    pub a_factor: R,
}

/// Which side of the rate-loss curve an operating point sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Errors dominated by optical imperfections; S decays linearly with
    /// loss on a log scale.
    AbsorptionLimited,
    /// Dark counts contribute the larger share of the error budget.
    NoiseLimited,
    /// The bracket of the rate equation is non-positive: no secret key.
    Zero,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::AbsorptionLimited => "absorption-limited",
            Regime::NoiseLimited => "noise-limited",
            Regime::Zero => "zero",
        }
    }
}

/// Asymptotic secret-key result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult<R> {
    pub s_sift_hz: R,
    pub s_secure_hz: R,
    pub regime: Regime,
}

/// Finite-size secret-key result for one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteKeyResult<R> {
    /// Bits kept for key generation.
    pub n_bits: R,
    /// Bits sacrificed to parameter estimation.
    pub m_bits: R,
    /// Extractable secret bits, floored at zero.
    pub secret_bits: R,
    /// QBER inflated by the parameter-estimation deviation term.
    pub e_tilde: R,
    /// True when the inflated error ratio reached 1/2 and the key was zeroed.
    pub estimate_saturated: bool,
}

/// Binary Shannon entropy in bits, with h(0) = h(1) = 0 by continuity.
pub fn binary_entropy<R: Real>(x: R) -> Result<R> {
    if !(x >= R::zero() && x <= R::one()) {
        return Err(Error::Domain(format!("entropy argument must lie in [0, 1], got {x:?}")));
    }
    if x == R::zero() || x == R::one() {
        return Ok(R::zero());
    }
    let one = R::one();
    Ok(-x * x.log2() - (one - x) * (one - x).log2())
}

/// Upper bound on the per-pulse multi-photon probability, mu^2 g2(0) / 2.
///
/// The g2(0) consumed here must be the unfiltered value even when temporal
/// windows are active: the photon statistics of the source are a worst-case
/// quantity that filtering at the receiver is not allowed to improve.
pub fn multi_photon_bound<R: Real>(mu: R, g2_zero: R) -> R {
    mu * mu * g2_zero / R::of(2.0)
}

/// Mean photon number per pulse backed out of a measured raw detection rate.
pub fn mu_from_raw<R: Real>(s_raw_hz: R, eta_bob: R, t_rep_ps: u64) -> R {
    s_raw_hz * R::of(t_rep_ps as f64 * 1e-12) / eta_bob
}

/// Assemble the per-pulse click and error budget for one operating point.
pub fn link_budget<R: Real>(
    source: &SourceParams<R>,
    receiver: &ReceiverParams<R>,
    loss_db: R,
    metrics: &WindowMetrics<R>,
) -> Result<LinkBudget<R>> {
    let transmittance = db_to_linear(loss_db)?;
    let p_sig = source.mu * transmittance * receiver.eta_bob * metrics.fraction;
    let p_dc_eff = receiver.p_dc_full(source.t_rep_ps) * metrics.dc_scale;
    let p_click = p_sig + p_dc_eff;
    if !(p_click > R::zero()) {
        return Err(Error::Undefined("click probability is zero; budget undefined".into()));
    }
    let half = R::of(0.5);
    let e_expected = (metrics.e_opt * p_sig + half * p_dc_eff) / p_click;
    let p_m = multi_photon_bound(source.mu, source.g2_zero);
    let a_factor = ((p_click - p_m) / p_click).max(R::zero());
    Ok(LinkBudget { p_sig, p_dc_eff, p_click, e_expected, p_m, a_factor })
}

impl<R: Real> LinkBudget<R> {
    /// Sifted key rate in Hz for this budget at the given clock and sifting
    /// factor (1/2 for a passive 50:50 basis choice).
    pub fn sift_rate_hz(&self, clock_hz: R, sift_factor: R) -> R {
        self.p_click * clock_hz * sift_factor
    }

    fn regime(&self) -> Regime {
        let half = R::of(0.5);
        if half * self.p_dc_eff > self.e_opt_contribution() {
            Regime::NoiseLimited
        } else {
            Regime::AbsorptionLimited
        }
    }

    fn e_opt_contribution(&self) -> R {
        // Optical share of the error budget: e * p_click - dark share.
        self.e_expected * self.p_click - R::of(0.5) * self.p_dc_eff
    }
}

/// Asymptotic secret key rate S = S_sift [A (1 - h(e/A)) - f_EC h(e)],
/// floored at zero.
pub fn asymptotic_rate<R: Real>(s_sift_hz: R, budget: &LinkBudget<R>, f_ec: R) -> Result<KeyRateResult<R>> {
    let bracket = asymptotic_bracket(budget, f_ec)?;
    if bracket <= R::zero() {
        return Ok(KeyRateResult { s_sift_hz, s_secure_hz: R::zero(), regime: Regime::Zero });
    }
    Ok(KeyRateResult { s_sift_hz, s_secure_hz: s_sift_hz * bracket, regime: budget.regime() })
}

/// The secret fraction A (1 - h(e/A)) - f_EC h(e); non-positive values mean
/// no key at this operating point.
pub fn asymptotic_bracket<R: Real>(budget: &LinkBudget<R>, f_ec: R) -> Result<R> {
    let e = budget.e_expected;
    let a = budget.a_factor;
    if a <= R::zero() {
        return Ok(-R::one());
    }
    let ratio = e / a;
    if ratio > R::of(0.5) {
        return Ok(-R::one());
    }
    Ok(a * (R::one() - binary_entropy(ratio)?) - f_ec * binary_entropy(e)?)
}

/// Finite-size secret key length for a block of n key bits after m bits of
/// parameter estimation observed an error ratio e.
pub fn finite_key<R: Real>(
    n_bits: R,
    m_bits: R,
    e_observed: R,
    budget: &LinkBudget<R>,
    security: &SecurityParams<R>,
) -> Result<FiniteKeyResult<R>> {
    security.validate()?;
    if !(n_bits >= R::one() && m_bits >= R::one()) {
        return Err(Error::Domain("finite-key blocks need n, m >= 1".into()));
    }
    if !(e_observed >= R::zero() && e_observed <= R::of(0.5)) {
        return Err(Error::Domain("observed error ratio must lie in [0, 1/2]".into()));
    }
    let two = R::of(2.0);
    let deviation = ((security.eps_pe.recip().ln() + two * (m_bits + R::one()).ln()) / (two * m_bits)).sqrt();
    let e_tilde = e_observed + deviation;

    let a = budget.a_factor;
    let half = R::of(0.5);
    let zeroed = |e_tilde| FiniteKeyResult {
        n_bits,
        m_bits,
        secret_bits: R::zero(),
        e_tilde,
        estimate_saturated: true,
    };
    if a <= R::zero() || e_tilde / a >= half {
        return Ok(zeroed(e_tilde));
    }
    let delta = R::of(7.0) * (n_bits * (two / security.eps_smooth).log2()).sqrt()
        + two * security.eps_pa.recip().log2()
        + (two / security.eps_ec).log2();
    let secret = n_bits * a * (R::one() - binary_entropy(e_tilde / a)?)
        - n_bits * security.f_ec * binary_entropy(e_observed)?
        - delta;
    Ok(FiniteKeyResult {
        n_bits,
        m_bits,
        secret_bits: secret.max(R::zero()),
        e_tilde,
        estimate_saturated: false,
    })
}

/// How the acceptance window is chosen when sweeping an operating parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowPolicy<R> {
    /// Full repetition period.
    Unfiltered,
    /// A fixed, pre-evaluated window.
    Fixed(WindowMetrics<R>),
}

/// One evaluated point of a rate-loss sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint<R> {
    pub loss_db: R,
    pub s_secure_hz: R,
    pub regime: Regime,
}

/// Everything needed to evaluate the key rate of one system at one loss.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyRateModel<R = f64> {
    pub source: SourceParams<R>,
    pub receiver: ReceiverParams<R>,
    pub security: SecurityParams<R>,
    /// Fraction of detected events surviving basis sifting (1/2 passive).
    pub sift_factor: R,
}

impl<R: Real> KeyRateModel<R> {
    pub fn new(source: SourceParams<R>, receiver: ReceiverParams<R>, security: SecurityParams<R>) -> Self {
        KeyRateModel { source, receiver, security, sift_factor: R::of(0.5) }
    }

    fn metrics_for(&self, policy: &WindowPolicy<R>) -> WindowMetrics<R> {
        match policy {
            WindowPolicy::Unfiltered => WindowMetrics::unfiltered(self.reduced_e_opt()),
            WindowPolicy::Fixed(m) => *m,
        }
    }

    /// Event-weight-free reduction of the per-state optical errors: the plain
    /// mean, appropriate when all four states are prepared equally often.
    pub fn reduced_e_opt(&self) -> R {
        let four = R::of(4.0);
        self.receiver.e_opt.iter().copied().sum::<R>() / four
    }

    /// Worst channel instead of the mean.
    pub fn worst_e_opt(&self) -> R {
        self.receiver.e_opt.iter().copied().fold(R::zero(), |a, b| a.max(b))
    }

    pub fn budget_at(&self, loss_db: R, policy: &WindowPolicy<R>) -> Result<LinkBudget<R>> {
        link_budget(&self.source, &self.receiver, loss_db, &self.metrics_for(policy))
    }

    pub fn asymptotic_at(&self, loss_db: R, policy: &WindowPolicy<R>) -> Result<KeyRateResult<R>> {
        let budget = self.budget_at(loss_db, policy)?;
        let s_sift = budget.sift_rate_hz(self.source.clock_hz(), self.sift_factor);
        asymptotic_rate(s_sift, &budget, self.security.f_ec)
    }

    /// Finite-size secret key for a transmission of `seconds`, splitting the
    /// sifted bits between estimation and key generation by q_pe.
    pub fn finite_at(&self, loss_db: R, seconds: R, policy: &WindowPolicy<R>) -> Result<FiniteKeyResult<R>> {
        let budget = self.budget_at(loss_db, policy)?;
        let s_sift = budget.sift_rate_hz(self.source.clock_hz(), self.sift_factor);
        let total = s_sift * seconds;
        let m_bits = (total * self.security.q_pe).floor().max(R::one());
        let n_bits = (total - m_bits).floor().max(R::one());
        finite_key(n_bits, m_bits, budget.e_expected, &budget, &self.security)
    }

    /// Asymptotic secret rate over the key-generation share of the sifted
    /// stream, (1 - q_pe) S_infinity: the ceiling that finite_at approaches
    /// as the transmission time grows at a fixed split.
    pub fn asymptotic_key_stream_rate(&self, loss_db: R, policy: &WindowPolicy<R>) -> Result<R> {
        let asym = self.asymptotic_at(loss_db, policy)?;
        Ok(asym.s_secure_hz * (R::one() - self.security.q_pe))
    }

    /// Evaluate the asymptotic or finite secret rate over a list of losses.
    pub fn rate_loss_sweep(
        &self,
        losses_db: &[R],
        seconds: Option<R>,
        policy: &WindowPolicy<R>,
    ) -> Result<Vec<RatePoint<R>>> {
        losses_db
            .iter()
            .map(|&loss| {
                let point = match seconds {
                    None => {
                        let r = self.asymptotic_at(loss, policy)?;
                        RatePoint { loss_db: loss, s_secure_hz: r.s_secure_hz, regime: r.regime }
                    }
                    Some(t) => {
                        let f = self.finite_at(loss, t, policy)?;
                        let regime = if f.secret_bits > R::zero() {
                            self.budget_at(loss, policy)?.regime()
                        } else {
                            Regime::Zero
                        };
                        RatePoint { loss_db: loss, s_secure_hz: f.secret_bits / t, regime }
                    }
                };
                Ok(point)
            })
            .collect()
    }

    /// Channel loss at which the asymptotic key rate reaches zero, bisected
    /// to 0.01 dB. Returns an error if even a lossless channel yields no key,
    /// and flags the degenerate no-noise case instead of searching forever.
    pub fn max_tolerable_loss_db(&self, policy: &WindowPolicy<R>) -> Result<TolerableLoss<R>> {
        self.max_tolerable_loss_with(|loss| {
            Ok(self.asymptotic_at(loss, policy)?.s_secure_hz > R::zero())
        })
    }

    /// Bisection helper shared with window-optimizing callers: `positive`
    /// reports whether any secret key survives at the given loss.
    pub fn max_tolerable_loss_with(
        &self,
        mut positive: impl FnMut(R) -> Result<bool>,
    ) -> Result<TolerableLoss<R>> {
        if !positive(R::zero())? {
            return Ok(TolerableLoss { loss_db: R::zero(), unbounded: false, no_key: true });
        }
        // A source with neither dark counts nor multi-photon weight never
        // crosses zero; report that instead of looping.
        let p_m = multi_photon_bound(self.source.mu, self.source.g2_zero);
        if self.receiver.dark_rate_total_hz() == R::zero() && p_m == R::zero() {
            return Ok(TolerableLoss { loss_db: R::infinity(), unbounded: true, no_key: false });
        }
        let mut lo = R::zero();
        let mut hi = R::of(1.0);
        let cap = R::of(400.0);
        while positive(hi)? {
            hi = hi * R::of(2.0);
            if hi > cap {
                return Ok(TolerableLoss { loss_db: R::infinity(), unbounded: true, no_key: false });
            }
        }
        let resolution = R::of(0.01);
        while hi - lo > resolution {
            let mid = (lo + hi) / R::of(2.0);
            if positive(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(TolerableLoss { loss_db: (lo + hi) / R::of(2.0), unbounded: false, no_key: false })
    }

    /// Smallest transmission time with a positive finite-size key, bisected
    /// to 1% relative precision.
    pub fn min_transmission_time_s(&self, loss_db: R, policy: &WindowPolicy<R>) -> Result<R> {
        let asym = self.asymptotic_at(loss_db, policy)?;
        if asym.s_secure_hz <= R::zero() {
            return Err(Error::Domain(format!(
                "no asymptotic key at {loss_db:?} dB; finite key cannot become positive"
            )));
        }
        let positive = |t: R| -> Result<bool> { Ok(self.finite_at(loss_db, t, policy)?.secret_bits > R::zero()) };
        let mut hi = R::one();
        let cap = R::of(1e12);
        while !positive(hi)? {
            hi = hi * R::of(2.0);
            if hi > cap {
                return Err(Error::Domain("finite key stays zero out to 1e12 s".into()));
            }
        }
        let mut lo = hi / R::of(2.0);
        let tol = R::of(0.01);
        while (hi - lo) / hi > tol {
            let mid = (lo + hi) / R::of(2.0);
            if positive(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// Result of a tolerable-loss search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerableLoss<R> {
    pub loss_db: R,
    /// No finite cutoff exists (no dark counts and no multi-photon weight).
    pub unbounded: bool,
    /// No key even at zero loss.
    pub no_key: bool,
}
