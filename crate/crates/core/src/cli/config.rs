//! Experiment configuration: JSON with the unit spelled out in every
//! dimensional key. Frequencies are cyclic (`ω/2π`).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bessel::bessel_j;
use crate::detect::ReferenceModel;
use crate::dynamics::params::{INTERACTION_TIME_DEFAULT, LOOPS_DEFAULT, OMEGA_G_DEFAULT, OMEGA_R_DEFAULT};
use crate::dynamics::{idd_amplitude, EffectiveParams, FrequencyResidual, NoiseSpec};
use crate::estimate::{DatasetShape, Method, TargetState};
use crate::hilbert::HilbertSpec;
use crate::sequence::addressing::ADDRESSING_AC_ZEEMAN_DIFFERENTIAL;
use crate::sequence::idd_echo::{DephasingNoiseModel, IddEchoConfig};
use crate::sequence::{EntanglingOptions, EnvelopeSpec, ExecOptions};
use crate::{Error, Result, TWO_PI};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalConfig {
    pub omega_g_mhz: f64,
    pub omega_r_mhz: f64,
    pub loops: usize,
    pub interaction_time_us: f64,
    /// Gate detuning Δ; `2πK/T` when absent.
    pub big_delta_khz: Option<f64>,
    /// Microwave detuning δ; only checked against `(ω_r − ω_g)/2 + Δ/2`.
    pub delta_mhz: Option<f64>,
    /// Gradient amplitude Ω_g; set for `g = Δ/(4√K)` when absent.
    pub big_omega_g_khz: Option<f64>,
    /// Microwave amplitude Ω_μ; first IDD point when absent.
    pub omega_mu_mhz: Option<f64>,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        PhysicalConfig {
            omega_g_mhz: OMEGA_G_DEFAULT / TWO_PI * 1e-6,
            omega_r_mhz: OMEGA_R_DEFAULT / TWO_PI * 1e-6,
            loops: LOOPS_DEFAULT,
            interaction_time_us: INTERACTION_TIME_DEFAULT * 1e6,
            big_delta_khz: None,
            delta_mhz: None,
            big_omega_g_khz: None,
            omega_mu_mhz: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// `null` disables motional dephasing.
    pub motional_coherence_time_ms: Option<f64>,
    pub heating_rate_quanta_per_s: f64,
    pub qubit_offset_khz: f64,
    pub motional_freq_mean_hz: f64,
    pub motional_freq_std_hz: f64,
    pub initial_nbar: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            motional_coherence_time_ms: None,
            heating_rate_quanta_per_s: 0.0,
            qubit_offset_khz: 0.0,
            motional_freq_mean_hz: 0.0,
            motional_freq_std_hz: 0.0,
            initial_nbar: 0.0,
        }
    }
}

impl NoiseConfig {
    /// Motional dephasing, heating and frequency drift of the experiment.
    pub fn experimental() -> Self {
        let s = NoiseSpec::experimental();
        NoiseConfig {
            motional_coherence_time_ms: s.motional_coherence_time.map(|t| t * 1e3),
            heating_rate_quanta_per_s: s.heating_rate,
            qubit_offset_khz: 0.0,
            motional_freq_mean_hz: s.motional_freq_residual.mean_hz,
            motional_freq_std_hz: s.motional_freq_residual.std_hz,
            initial_nbar: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub walsh: bool,
    pub segments: usize,
    pub ramp_us: f64,
    /// Duration of each π and π/2 pulse; 0 means instantaneous.
    pub pulse_us: f64,
    pub ac_zeeman_common_khz: f64,
    /// Follow the gate with the single-ion addressing echo that maps |Φ⟩ to |Ψ₋⟩.
    pub addressing: bool,
    pub ac_zeeman_differential_khz: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        let e = EntanglingOptions::default();
        ScheduleConfig {
            walsh: e.walsh,
            segments: e.segments,
            ramp_us: EnvelopeSpec::default().ramp_duration_ns as f64 * 1e-3,
            pulse_us: e.pulse_duration_ns as f64 * 1e-3,
            ac_zeeman_common_khz: e.ac_zeeman_common / TWO_PI * 1e-3,
            addressing: false,
            ac_zeeman_differential_khz: ADDRESSING_AC_ZEEMAN_DIFFERENTIAL / TWO_PI * 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExecutionConfig {
    pub fock_dim: usize,
    pub substeps_per_loop: usize,
    pub drift_samples: usize,
    pub pi_overrotation: f64,
    pub pi2_overrotation: f64,
}

impl Default for ExecutionConfig {
    fn default() -> Self {
        let e = ExecOptions::default();
        ExecutionConfig {
            fock_dim: e.fock_dim,
            substeps_per_loop: e.substeps_per_loop,
            drift_samples: e.drift_samples,
            pi_overrotation: e.pi_overrotation,
            pi2_overrotation: e.pi2_overrotation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    pub lambda_bright_counts: f64,
    pub lambda_dark_counts: f64,
    pub repump_prob: f64,
    pub depump_prob: f64,
    pub leak_prob: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        let m = ReferenceModel::default();
        DetectionConfig {
            lambda_bright_counts: m.lambda_bright,
            lambda_dark_counts: m.lambda_dark,
            repump_prob: m.repump_rate,
            depump_prob: m.depump_rate,
            leak_prob: 3.5e-3,
        }
    }
}

/// Where the synthesized data come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TrueState {
    /// Dephased Bell state of the given fidelity, with leakage added.
    Fidelity { fidelity: f64 },
    /// Output of the simulated gate (and addressing for |Ψ₋⟩) from a leaky
    /// initial state.
    Simulated,
    /// A density matrix file with `re` and `im` arrays, 4×4 (qubits) or 9×9.
    DensityMatrix { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub target: TargetState,
    pub dataset_id: u64,
    pub population_sets: usize,
    pub trials_per_set: u64,
    /// Analysis phases of the parity sets; the standard grid of the target when absent.
    pub parity_phases_rad: Option<Vec<f64>>,
    pub reference_sets: usize,
    pub reference_trials: u64,
    pub true_state: TrueState,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            target: TargetState::Symmetric,
            dataset_id: 1,
            population_sets: 40,
            trials_per_set: 200,
            parity_phases_rad: None,
            reference_sets: 1,
            reference_trials: 18_500,
            true_state: TrueState::Fidelity { fidelity: 0.9977 },
        }
    }
}

impl DatasetConfig {
    pub fn shape(&self) -> DatasetShape {
        let parity_phases = self.parity_phases_rad.clone().unwrap_or_else(|| DatasetShape::standard(self.target).parity_phases);
        DatasetShape { population_sets: self.population_sets, trials_per_set: self.trials_per_set, parity_phases }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    pub methods: Vec<Method>,
    pub n_boot: usize,
    pub lambda_jitter: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig { methods: Method::ALL.to_vec(), n_boot: 5000, lambda_jitter: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiasScanConfig {
    pub fidelities: Vec<f64>,
    pub replicates: usize,
}

impl Default for BiasScanConfig {
    fn default() -> Self {
        BiasScanConfig { fidelities: vec![0.5, 0.9, 0.99, 0.995, 0.999], replicates: 1000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    /// Bell-state infidelity of the gate against one configuration value.
    Gate,
    /// Spin-echo contrast with the bichromatic drive off and on.
    Coherence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub kind: ScanKind,
    /// Dotted path of a numeric configuration value, e.g. `noise.qubit_offset_khz`.
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log_y: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { kind: ScanKind::Gate, parameter: "noise.qubit_offset_khz".into(), start: -200.0, stop: 200.0, points: 21, log_y: true }
    }
}

impl ScanConfig {
    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        (0..self.points).map(|i| self.start + (self.stop - self.start) * i as f64 / (self.points - 1) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IddConfig {
    pub delta_mhz: f64,
    pub branch: usize,
    pub trajectories: usize,
    /// Standard deviation of each OU component of the qubit-frequency noise.
    pub noise_sigma_each_khz: f64,
    pub noise_tau_min_us: f64,
    pub noise_components: usize,
    pub noise_white_rate_per_s: f64,
    pub off_durations_us: [f64; 2],
    pub on_durations_us: [f64; 2],
    pub points: usize,
}

impl Default for IddConfig {
    fn default() -> Self {
        IddConfig {
            delta_mhz: 0.95,
            branch: 1,
            trajectories: 96,
            noise_sigma_each_khz: 1.2,
            noise_tau_min_us: 10.0,
            noise_components: 6,
            noise_white_rate_per_s: 150.0,
            off_durations_us: [20.0, 5_000.0],
            on_durations_us: [200.0, 40_000.0],
            points: 16,
        }
    }
}

impl IddConfig {
    pub fn echo_config(&self, seed: u64) -> IddEchoConfig {
        IddEchoConfig {
            delta: TWO_PI * self.delta_mhz * 1e6,
            branch: self.branch,
            noise: DephasingNoiseModel::one_over_f(
                TWO_PI * self.noise_sigma_each_khz * 1e3,
                self.noise_tau_min_us * 1e-6,
                self.noise_components,
                self.noise_white_rate_per_s,
            ),
            trajectories: self.trajectories,
            seed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub physical: PhysicalConfig,
    pub noise: NoiseConfig,
    pub schedule: ScheduleConfig,
    pub execution: ExecutionConfig,
    pub detection: DetectionConfig,
    pub dataset: DatasetConfig,
    pub estimate: EstimateConfig,
    pub bias: BiasScanConfig,
    pub scan: ScanConfig,
    pub idd: IddConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn locate(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        if let Err((key, msg)) = cfg.check() {
            let at = locate(text, key).map_or_else(String::new, |l| format!("line {l}: "));
            return Err(Error::Config(format!("{at}{key}: {msg}")));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_pretty()?)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|(key, msg)| Error::Config(format!("{key}: {msg}")))
    }

    /// Checks every value; the error names the offending key.
    fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        let positive =
            |key: &'static str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err((key, format!("must be positive, got {v}"))) };
        let non_negative = |key: &'static str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err((key, format!("must be non-negative, got {v}")))
            }
        };
        let ph = &self.physical;
        positive("omega_g_mhz", ph.omega_g_mhz)?;
        positive("omega_r_mhz", ph.omega_r_mhz)?;
        positive("interaction_time_us", ph.interaction_time_us)?;
        if ph.loops == 0 {
            return Err(("loops", "must be at least 1".into()));
        }
        if let Some(t) = self.noise.motional_coherence_time_ms {
            positive("motional_coherence_time_ms", t)?;
        }
        non_negative("heating_rate_quanta_per_s", self.noise.heating_rate_quanta_per_s)?;
        non_negative("motional_freq_std_hz", self.noise.motional_freq_std_hz)?;
        non_negative("initial_nbar", self.noise.initial_nbar)?;
        non_negative("ramp_us", self.schedule.ramp_us)?;
        non_negative("pulse_us", self.schedule.pulse_us)?;
        if self.schedule.segments == 0 {
            return Err(("segments", "must be at least 1".into()));
        }
        if HilbertSpec::new(self.execution.fock_dim).is_err() {
            return Err(("fock_dim", format!("invalid Fock dimension {}", self.execution.fock_dim)));
        }
        if self.execution.substeps_per_loop == 0 {
            return Err(("substeps_per_loop", "must be at least 1".into()));
        }
        self.reference_model().validate().map_err(|e| ("detection", e.to_string()))?;
        let d = &self.dataset;
        if d.trials_per_set == 0 {
            return Err(("trials_per_set", "must be at least 1".into()));
        }
        if d.reference_sets == 0 || d.reference_trials == 0 {
            return Err(("reference_sets", "need at least one non-empty reference set".into()));
        }
        if let TrueState::Fidelity { fidelity } = d.true_state {
            if !(0.0..=1.0).contains(&fidelity) {
                return Err(("fidelity", format!("must lie in [0, 1], got {fidelity}")));
            }
        }
        if self.estimate.methods.is_empty() {
            return Err(("methods", "at least one method is required".into()));
        }
        non_negative("lambda_jitter", self.estimate.lambda_jitter)?;
        if self.bias.fidelities.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(("fidelities", "fidelities must lie in [0, 1]".into()));
        }
        if self.scan.points == 0 {
            return Err(("points", "must be at least 1".into()));
        }
        positive("delta_mhz", self.idd.delta_mhz)?;
        self.effective_params().map_err(|e| ("physical", e.to_string()))?;
        Ok(())
    }

    /// Effective interaction parameters, filling unset amplitudes from the
    /// maximal-entanglement operating point.
    pub fn effective_params(&self) -> Result<EffectiveParams> {
        let ph = &self.physical;
        let omega_g = TWO_PI * ph.omega_g_mhz * 1e6;
        let omega_r = TWO_PI * ph.omega_r_mhz * 1e6;
        let t = ph.interaction_time_us * 1e-6;
        let big_delta = ph.big_delta_khz.map_or(TWO_PI * ph.loops as f64 / t, |v| TWO_PI * v * 1e3);
        let delta = 0.5 * (omega_r - omega_g) + 0.5 * big_delta;
        let omega_mu = match ph.omega_mu_mhz {
            Some(v) => TWO_PI * v * 1e6,
            None => idd_amplitude(delta, 1)?,
        };
        let big_omega_g = match ph.big_omega_g_khz {
            Some(v) => TWO_PI * v * 1e3,
            None => big_delta / (4.0 * (ph.loops as f64).sqrt()) / bessel_j(2, 4.0 * omega_mu / delta),
        };
        match ph.delta_mhz {
            Some(d) => EffectiveParams::with_delta_check(omega_g, omega_r, TWO_PI * d * 1e6, big_delta, big_omega_g, omega_mu),
            None => EffectiveParams::new(omega_g, omega_r, big_delta, big_omega_g, omega_mu),
        }
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        let n = &self.noise;
        NoiseSpec {
            motional_coherence_time: n.motional_coherence_time_ms.map(|t| t * 1e-3),
            heating_rate: n.heating_rate_quanta_per_s,
            qubit_detuning: TWO_PI * n.qubit_offset_khz * 1e3,
            motional_freq_residual: FrequencyResidual { mean_hz: n.motional_freq_mean_hz, std_hz: n.motional_freq_std_hz },
            initial_nbar: n.initial_nbar,
        }
    }

    pub fn envelope(&self) -> EnvelopeSpec {
        EnvelopeSpec { ramp_duration_ns: (self.schedule.ramp_us * 1e3).round() as u64 }
    }

    pub fn entangling_options(&self) -> EntanglingOptions {
        let s = &self.schedule;
        EntanglingOptions {
            segments: s.segments,
            walsh: s.walsh,
            pulse_duration_ns: (s.pulse_us * 1e3).round() as u64,
            ac_zeeman_common: TWO_PI * s.ac_zeeman_common_khz * 1e3,
            expected_total_ns: None,
        }
    }

    pub fn exec_options(&self, seed: u64) -> ExecOptions {
        let e = &self.execution;
        ExecOptions {
            fock_dim: e.fock_dim,
            substeps_per_loop: e.substeps_per_loop,
            pi_overrotation: e.pi_overrotation,
            pi2_overrotation: e.pi2_overrotation,
            drift_samples: e.drift_samples,
            seed,
        }
    }

    pub fn reference_model(&self) -> ReferenceModel {
        let d = &self.detection;
        ReferenceModel {
            lambda_bright: d.lambda_bright_counts,
            lambda_dark: d.lambda_dark_counts,
            repump_rate: d.repump_prob,
            depump_rate: d.depump_prob,
            leak_prob: d.leak_prob,
        }
    }

    /// SHA-256 of the configuration with the output location blanked, so
    /// the same experiment written to different directories hashes equally.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        Ok(hex::encode(Sha256::digest(serde_json::to_string(&c)?.as_bytes())))
    }

    /// Copy with the numeric value at dotted `path` replaced by `value`.
    pub fn with_value(&self, path: &str, value: f64) -> Result<Self> {
        let mut tree = serde_json::to_value(self)?;
        let mut node = &mut tree;
        for part in path.split('.') {
            node = node
                .as_object_mut()
                .and_then(|m| m.get_mut(part))
                .ok_or_else(|| Error::Config(format!("unknown parameter path {path}")))?;
        }
        if !(node.is_number() || node.is_null()) {
            return Err(Error::Config(format!("parameter {path} is not numeric")));
        }
        *node = serde_json::json!(value);
        let cfg: ExperimentConfig = serde_json::from_value(tree).map_err(|e| Error::Config(format!("{path}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c = ExperimentConfig::from_json_str("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let p = c.effective_params().unwrap();
        let q = EffectiveParams::operating_default();
        for (a, b) in [(p.big_delta, q.big_delta), (p.big_omega_g, q.big_omega_g), (p.omega_mu, q.omega_mu), (p.delta, q.delta)] {
            assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = "{\n  \"noise\": {\n    \"heating_rate\": 1.0\n  }\n}";
        let e = ExperimentConfig::from_json_str(text).unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        assert!(e.contains("heating_rate"), "{e}");
    }

    #[test]
    fn invalid_value_reports_line() {
        let text = "{\n  \"noise\": {\n    \"heating_rate_quanta_per_s\": -1.0\n  }\n}";
        let e = ExperimentConfig::from_json_str(text).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("line 3: heating_rate_quanta_per_s"), "{e}");
    }

    #[test]
    fn delta_relation_is_checked() {
        let c = ExperimentConfig::default();
        let p = c.effective_params().unwrap();
        let mut ok = c.clone();
        ok.physical.delta_mhz = Some(p.delta / TWO_PI * 1e-6);
        ok.physical.big_delta_khz = Some(p.big_delta / TWO_PI * 1e-3);
        ok.validate().unwrap();
        let mut bad = ok.clone();
        bad.physical.delta_mhz = Some(p.delta / TWO_PI * 1e-6 * (1.0 + 1e-6));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn parameter_paths() {
        let c = ExperimentConfig::default();
        let d = c.with_value("noise.qubit_offset_khz", 12.5).unwrap();
        assert_eq!(d.noise.qubit_offset_khz, 12.5);
        let d = c.with_value("noise.motional_coherence_time_ms", 64.0).unwrap();
        assert_eq!(d.noise.motional_coherence_time_ms, Some(64.0));
        assert!(c.with_value("noise.nonexistent", 1.0).is_err());
        assert!(c.with_value("schedule.walsh", 1.0).is_err());
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output_dir = "elsewhere".into();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 1;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trip(
            offset in -500.0f64..500.0,
            tau in proptest::option::of(1.0f64..1e3),
            leak in 0.0f64..0.05,
            seed in any::<u64>(),
            n_boot in 1usize..10_000,
            antisym in any::<bool>(),
        ) {
            let mut c = ExperimentConfig::default();
            c.noise.qubit_offset_khz = offset;
            c.noise.motional_coherence_time_ms = tau;
            c.detection.leak_prob = leak;
            c.seed = seed;
            c.estimate.n_boot = n_boot;
            if antisym {
                c.dataset.target = TargetState::Antisymmetric;
                c.dataset.true_state = TrueState::Simulated;
            }
            let text = c.to_json_pretty().unwrap();
            let back = ExperimentConfig::from_json_str(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.to_json_pretty().unwrap(), text);
        }
    }
}
