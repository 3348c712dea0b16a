//! Circuit description: node order, connectivity schemes, weight matrices,
//! sigmoid families, delay kernels and the named presets.
//!
//! Node order is fixed as `(E1, I1, E2, I2)`. Weight matrices are indexed
//! `[target][source]`, and slot names read target first: `E1I1` is the
//! projection from `I1` onto `E1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four populations, in state-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    E1,
    I1,
    E2,
    I2,
}

impl Node {
    pub const ALL: [Node; 4] = [Node::E1, Node::I1, Node::E2, Node::I2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Node::E1 => "E1",
            Node::I1 => "I1",
            Node::E2 => "E2",
            Node::I2 => "I2",
        }
    }

    fn parse(s: &str) -> Option<Node> {
        match s {
            "E1" => Some(Node::E1),
            "I1" => Some(Node::I1),
            "E2" => Some(Node::E2),
            "I2" => Some(Node::I2),
            _ => None,
        }
    }
}

/// A weight slot `w_{target,source}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightSlot {
    pub target: Node,
    pub source: Node,
}

impl WeightSlot {
    pub const fn new(target: Node, source: Node) -> Self {
        Self { target, source }
    }

    /// Canonical name, e.g. `E1I1`.
    pub fn name(self) -> String {
        format!("{}{}", self.target.name(), self.source.name())
    }

    fn parse(s: &str) -> Option<WeightSlot> {
        if s.len() != 4 {
            return None;
        }
        let target = Node::parse(&s[..2])?;
        let source = Node::parse(&s[2..])?;
        Some(WeightSlot::new(target, source))
    }
}

impl fmt::Display for WeightSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w_{}", self.name())
    }
}

use Node::{E1, E2, I1, I2};

const INTRA: [WeightSlot; 4] = [
    WeightSlot::new(E1, I1),
    WeightSlot::new(I1, E1),
    WeightSlot::new(E2, I2),
    WeightSlot::new(I2, E2),
];

/// The four symmetric coupling schemes between the two E/I pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectivityScheme {
    /// `E1 <-> E2`
    EE,
    /// `I1 <-> I2`
    II,
    /// `E1 -> I2` and `E2 -> I1`
    EtoI,
    /// `I1 -> E2` and `I2 -> E1`
    ItoE,
}

impl ConnectivityScheme {
    pub const ALL: [ConnectivityScheme; 4] = [
        ConnectivityScheme::EE,
        ConnectivityScheme::II,
        ConnectivityScheme::EtoI,
        ConnectivityScheme::ItoE,
    ];

    /// The two inter-pair slots of the scheme.
    pub fn cross_slots(self) -> [WeightSlot; 2] {
        match self {
            ConnectivityScheme::EE => [WeightSlot::new(E1, E2), WeightSlot::new(E2, E1)],
            ConnectivityScheme::II => [WeightSlot::new(I1, I2), WeightSlot::new(I2, I1)],
            ConnectivityScheme::EtoI => [WeightSlot::new(I2, E1), WeightSlot::new(I1, E2)],
            ConnectivityScheme::ItoE => [WeightSlot::new(E2, I1), WeightSlot::new(E1, I2)],
        }
    }

    /// All six active slots: four intra-pair followed by the two cross slots.
    pub fn slots(self) -> [WeightSlot; 6] {
        let [c0, c1] = self.cross_slots();
        [INTRA[0], INTRA[1], INTRA[2], INTRA[3], c0, c1]
    }

    pub fn contains(self, slot: WeightSlot) -> bool {
        self.slots().contains(&slot)
    }

    /// Resolve a user-supplied weight name to one of this scheme's slots.
    ///
    /// Accepts `E1I1`, `w_E1I1`, `w_{E1I1}` and unicode subscripts. Under
    /// `EtoI` the reversed spellings `E1I2` / `E2I1` are accepted as aliases
    /// for the `I2E1` / `I1E2` slots, since published tables for that scheme
    /// use both subscript orders.
    pub fn resolve(self, name: &str) -> Result<WeightSlot> {
        let canon = canonical_name(name);
        let slot = WeightSlot::parse(&canon)
            .ok_or_else(|| Error::UnknownWeightName(name.to_string()))?;
        if self.contains(slot) {
            return Ok(slot);
        }
        if self == ConnectivityScheme::EtoI {
            let flipped = WeightSlot::new(slot.source, slot.target);
            if self.cross_slots().contains(&flipped) {
                return Ok(flipped);
            }
        }
        Err(Error::UnknownWeightName(name.to_string()))
    }
}

impl fmt::Display for ConnectivityScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConnectivityScheme::EE => "EE",
            ConnectivityScheme::II => "II",
            ConnectivityScheme::EtoI => "EtoI",
            ConnectivityScheme::ItoE => "ItoE",
        };
        f.write_str(s)
    }
}

fn canonical_name(name: &str) -> String {
    let mut s: String = name
        .chars()
        .filter(|c| !matches!(c, '{' | '}' | '_' | ' ' | '\t'))
        .map(|c| match c {
            '₁' => '1',
            '₂' => '2',
            c => c.to_ascii_uppercase(),
        })
        .collect();
    if s.len() == 5 && s.starts_with('W') {
        s.remove(0);
    }
    s
}

/// Signed 4x4 synaptic weights, `[target][source]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeightMatrix(pub [[f64; 4]; 4]);

impl WeightMatrix {
    pub fn zeros() -> Self {
        Self::default()
    }

    pub fn get(&self, slot: WeightSlot) -> f64 {
        self.0[slot.target.index()][slot.source.index()]
    }

    pub fn set(&mut self, slot: WeightSlot, value: f64) {
        self.0[slot.target.index()][slot.source.index()] = value;
    }

    /// Row `j` dotted with `x`.
    pub fn row_dot(&self, j: usize, x: &[f64; 4]) -> f64 {
        self.0[j].iter().zip(x).map(|(w, v)| w * v).sum()
    }

    pub fn mul_vec(&self, x: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|j| self.row_dot(j, x))
    }

    /// Named slot values for the given scheme.
    pub fn named(&self, scheme: ConnectivityScheme) -> BTreeMap<String, f64> {
        scheme
            .slots()
            .iter()
            .map(|&s| (s.name(), self.get(s)))
            .collect()
    }

    /// First nonzero entry outside the scheme's slots, if any.
    pub fn check_scheme(&self, scheme: ConnectivityScheme) -> Result<()> {
        for (row, r) in self.0.iter().enumerate() {
            for (col, &w) in r.iter().enumerate() {
                let slot = WeightSlot::new(Node::ALL[row], Node::ALL[col]);
                if w != 0.0 && !scheme.contains(slot) {
                    return Err(Error::SchemeMismatch {
                        scheme: scheme.to_string(),
                        row,
                        col,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Place named weights into a matrix for `scheme`.
///
/// Every slot of the scheme must be named exactly once; anything else is an
/// error.
pub fn build_connectivity<'a, I>(scheme: ConnectivityScheme, named: I) -> Result<WeightMatrix>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut m = WeightMatrix::zeros();
    let mut seen = Vec::with_capacity(6);
    for (name, value) in named {
        let slot = scheme.resolve(name)?;
        if seen.contains(&slot) {
            return Err(Error::InvalidParameter(format!(
                "weight slot {slot} given more than once"
            )));
        }
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("weight {slot} is not finite")));
        }
        seen.push(slot);
        m.set(slot, value);
    }
    if let Some(missing) = scheme.slots().iter().find(|s| !seen.contains(s)) {
        return Err(Error::MissingWeight(missing.to_string()));
    }
    Ok(m)
}

/// Integrating sigmoid of one population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SigmoidSpec {
    /// `1/(1+exp(-b(u-theta))) - 1/(1+exp(b theta))`, zero at `u = 0`.
    WilsonCowan { b: f64, theta: f64 },
    /// `M / (1 + (M/B - 1) exp(-4u/M))`, equal to `B` at `u = 0`.
    WangNaturalMax {
        #[serde(rename = "M")]
        max_rate: f64,
        #[serde(rename = "B")]
        base_rate: f64,
    },
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl SigmoidSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SigmoidSpec::WilsonCowan { b, theta } => {
                if !(b > 0.0 && theta > 0.0 && b.is_finite() && theta.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "Wilson-Cowan sigmoid needs b > 0 and theta > 0 (got b = {b}, theta = {theta})"
                    )));
                }
            }
            SigmoidSpec::WangNaturalMax { max_rate, base_rate } => {
                if !(base_rate > 0.0 && base_rate < max_rate && max_rate.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "natural-max sigmoid needs 0 < B < M (got M = {max_rate}, B = {base_rate})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            SigmoidSpec::WilsonCowan { b, theta } => {
                logistic(b * (u - theta)) - logistic(-b * theta)
            }
            SigmoidSpec::WangNaturalMax { max_rate, base_rate } => {
                let q = (max_rate / base_rate - 1.0) * (-4.0 * u / max_rate).exp();
                max_rate / (1.0 + q)
            }
        }
    }

    /// Closed-form derivative.
    pub fn deriv(&self, u: f64) -> f64 {
        match *self {
            SigmoidSpec::WilsonCowan { b, theta } => {
                let s = logistic(b * (u - theta));
                b * s * (1.0 - s)
            }
            SigmoidSpec::WangNaturalMax { max_rate, base_rate } => {
                let q = (max_rate / base_rate - 1.0) * (-4.0 * u / max_rate).exp();
                // 4q/(1+q)^2 written so that q -> 0 and q -> inf both stay finite
                4.0 / (q + 2.0 + 1.0 / q)
            }
        }
    }

    /// Open interval containing every value of the sigmoid.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            SigmoidSpec::WilsonCowan { b, theta } => {
                let off = logistic(-b * theta);
                (-off, 1.0 - off)
            }
            SigmoidSpec::WangNaturalMax { max_rate, .. } => (0.0, max_rate),
        }
    }
}

/// Free functions mirroring the sigmoid methods.
pub fn sigmoid_eval(spec: &SigmoidSpec, u: f64) -> f64 {
    spec.eval(u)
}

pub fn sigmoid_deriv(spec: &SigmoidSpec, u: f64) -> f64 {
    spec.deriv(u)
}

/// Shape of the delay distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// Discrete delay, `h(t) = delta(t - tau)`.
    Dirac,
    /// Exponential memory with mean `tau`.
    WeakGamma,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Dirac => "dirac",
            KernelKind::WeakGamma => "weak-gamma",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "dirac" => Ok(KernelKind::Dirac),
            "weak-gamma" | "gamma" => Ok(KernelKind::WeakGamma),
            other => Err(Error::Config(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Kernel family with its mean delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayKernel {
    pub kind: KernelKind,
    pub tau_ms: f64,
}

impl DelayKernel {
    pub fn new(kind: KernelKind, tau_ms: f64) -> Self {
        Self { kind, tau_ms }
    }
}

/// A fully specified circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkConfig", into = "NetworkConfig")]
pub struct NetworkSpec {
    pub scheme: ConnectivityScheme,
    pub weights: WeightMatrix,
    pub sigmoids: [SigmoidSpec; 4],
    pub inputs: [f64; 4],
    pub tau_bar_ms: f64,
    pub kernel: DelayKernel,
}

/// JSON layout of a circuit configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub scheme: ConnectivityScheme,
    pub weights: BTreeMap<String, f64>,
    pub sigmoids: [SigmoidSpec; 4],
    pub inputs: [f64; 4],
    pub tau_bar_ms: f64,
    pub kernel: DelayKernel,
}

impl TryFrom<NetworkConfig> for NetworkSpec {
    type Error = Error;

    fn try_from(c: NetworkConfig) -> Result<Self> {
        let weights =
            build_connectivity(c.scheme, c.weights.iter().map(|(k, v)| (k.as_str(), *v)))?;
        let net = NetworkSpec {
            scheme: c.scheme,
            weights,
            sigmoids: c.sigmoids,
            inputs: c.inputs,
            tau_bar_ms: c.tau_bar_ms,
            kernel: c.kernel,
        };
        net.validate()?;
        Ok(net)
    }
}

impl From<NetworkSpec> for NetworkConfig {
    fn from(n: NetworkSpec) -> Self {
        NetworkConfig {
            scheme: n.scheme,
            weights: n.weights.named(n.scheme),
            sigmoids: n.sigmoids,
            inputs: n.inputs,
            tau_bar_ms: n.tau_bar_ms,
            kernel: n.kernel,
        }
    }
}

/// Reference-model coupling names for the cortex/basal-ganglia circuit.
/// Each maps onto one or two `EE` slots with a fixed sign.
const REFERENCE_NAMES: [(&str, &[(WeightSlot, f64)]); 5] = [
    ("GS", &[(WeightSlot::new(E1, I1), -1.0)]),
    ("SG", &[(WeightSlot::new(I1, E1), 1.0)]),
    ("CS", &[(WeightSlot::new(E1, E2), 1.0)]),
    ("SC", &[(WeightSlot::new(E2, E1), -1.0)]),
    (
        "CC",
        &[(WeightSlot::new(E2, I2), -1.0), (WeightSlot::new(I2, E2), 1.0)],
    ),
];

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_bar_ms > 0.0 && self.tau_bar_ms.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau_bar_ms must be positive (got {})",
                self.tau_bar_ms
            )));
        }
        if !(self.kernel.tau_ms > 0.0 && self.kernel.tau_ms.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kernel tau_ms must be positive (got {})",
                self.kernel.tau_ms
            )));
        }
        if self.inputs.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("inputs must be finite".into()));
        }
        for s in &self.sigmoids {
            s.validate()?;
        }
        self.weights.check_scheme(self.scheme)
    }

    /// Sigmoid arguments `C x + P`.
    pub fn drive(&self, x: &[f64; 4]) -> [f64; 4] {
        let cx = self.weights.mul_vec(x);
        std::array::from_fn(|j| cx[j] + self.inputs[j])
    }

    /// `F_j(u_j)` for each node.
    pub fn activation(&self, u: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|j| self.sigmoids[j].eval(u[j]))
    }

    /// Gains `phi_j = F_j'([C_j] x + P_j)`.
    pub fn gains(&self, x: &[f64; 4]) -> [f64; 4] {
        let u = self.drive(x);
        std::array::from_fn(|j| self.sigmoids[j].deriv(u[j]))
    }

    /// Set a coupling by slot name (`E2E1`, `w_{E2E1}`, ...) or by a
    /// reference-model name (`W_GS`, `W_SG`, `W_CS`, `W_SC`, `W_CC`).
    ///
    /// Reference names carry the reference model's signs, e.g. `W_SC = 2.58`
    /// stores `w_{E2E1} = -2.58`. They are only meaningful for the `EE` scheme.
    pub fn set_weight(&mut self, name: &str, value: f64) -> Result<()> {
        if let Ok(slot) = self.scheme.resolve(name) {
            self.weights.set(slot, value);
            return Ok(());
        }
        let canon = canonical_name(name);
        let key = canon.strip_prefix('W').unwrap_or(&canon);
        let entry = REFERENCE_NAMES.iter().find(|(n, _)| *n == key);
        match entry {
            Some((_, targets)) if self.scheme == ConnectivityScheme::EE => {
                for &(slot, sign) in targets.iter() {
                    self.weights.set(slot, sign * value);
                }
                Ok(())
            }
            _ => Err(Error::UnknownWeightName(name.to_string())),
        }
    }

    pub fn with_weight(mut self, name: &str, value: f64) -> Result<Self> {
        self.set_weight(name, value)?;
        Ok(self)
    }

    pub fn with_kernel(mut self, kind: KernelKind, tau_ms: f64) -> Self {
        self.kernel = DelayKernel::new(kind, tau_ms);
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 3] = ["wang-baseline", "pfc-bla-a", "pfc-bla-b"];

/// Dirac delay used by the basal-ganglia reference simulations, in ms.
pub const WANG_REFERENCE_DELAY_MS: f64 = 3.94924;

/// Time constant assigned to the prefrontal/amygdala presets, in ms. Those
/// experiments are stated in units of `tau / tau_bar` only.
pub const PFC_BLA_TAU_BAR_MS: f64 = 10.0;

/// Cortex / basal-ganglia circuit at its baseline coupling (`EE` scheme,
/// node order STN, GPe, EXN, INN).
///
/// The striatal drive onto GPe enters with a negative sign: it is an
/// inhibitory projection in the reference model, and only this sign places the
/// first Dirac critical delay at 3.94924 ms.
pub fn wang_baseline() -> NetworkSpec {
    let weights = build_connectivity(
        ConnectivityScheme::EE,
        [
            ("E1I1", -4.87),
            ("I1E1", 2.56),
            ("E1E2", 6.60),
            ("E2E1", -2.58),
            ("E2I2", -1.56),
            ("I2E2", 1.56),
        ],
    )
    .expect("static weights");
    let wang = |m: f64, b: f64| SigmoidSpec::WangNaturalMax {
        max_rate: m,
        base_rate: b,
    };
    NetworkSpec {
        scheme: ConnectivityScheme::EE,
        weights,
        sigmoids: [
            wang(300.0, 17.0),
            wang(400.0, 75.0),
            wang(71.77, 3.62),
            wang(277.39, 9.87),
        ],
        inputs: [0.0, -40.51, 172.18, 0.0],
        tau_bar_ms: 15.0,
        kernel: DelayKernel::new(KernelKind::Dirac, WANG_REFERENCE_DELAY_MS),
    }
}

fn pfc_bla(scheme: ConnectivityScheme, cross: [f64; 2]) -> Result<NetworkSpec> {
    let [c0, c1] = scheme.cross_slots();
    let mut weights = WeightMatrix::zeros();
    weights.set(WeightSlot::new(I1, E1), 2.0);
    weights.set(WeightSlot::new(I2, E2), 2.0);
    weights.set(WeightSlot::new(E1, I1), -16.0);
    weights.set(WeightSlot::new(E2, I2), -16.0);
    weights.set(c0, cross[0]);
    weights.set(c1, cross[1]);
    let exc = SigmoidSpec::WilsonCowan { b: 1.2, theta: 4.0 };
    let inh = SigmoidSpec::WilsonCowan { b: 1.0, theta: 2.0 };
    let net = NetworkSpec {
        scheme,
        weights,
        sigmoids: [exc, inh, exc, inh],
        inputs: [6.0, 0.0, 6.0, 0.0],
        tau_bar_ms: PFC_BLA_TAU_BAR_MS,
        kernel: DelayKernel::new(KernelKind::Dirac, PFC_BLA_TAU_BAR_MS),
    };
    net.validate()?;
    Ok(net)
}

/// Prefrontal/amygdala model A (`EtoI` scheme). Cross weights are
/// `w_{I2E1}` (PFC pyramidal onto BLA interneurons) and `w_{I1E2}`.
pub fn pfc_bla_model_a(w_i2e1: f64, w_i1e2: f64) -> Result<NetworkSpec> {
    pfc_bla(ConnectivityScheme::EtoI, [w_i2e1, w_i1e2])
}

/// Prefrontal/amygdala model B (`EE` scheme). Cross weights are
/// `w_{E1E2}` and `w_{E2E1}`.
pub fn pfc_bla_model_b(w_e1e2: f64, w_e2e1: f64) -> Result<NetworkSpec> {
    pfc_bla(ConnectivityScheme::EE, [w_e1e2, w_e2e1])
}

/// Look up a named preset. The prefrontal presets come with zero cross
/// coupling; set the swept weights with [`NetworkSpec::set_weight`].
pub fn preset(name: &str) -> Result<NetworkSpec> {
    match name {
        "wang-baseline" => Ok(wang_baseline()),
        "pfc-bla-a" => pfc_bla_model_a(0.0, 0.0),
        "pfc-bla-b" => pfc_bla_model_b(0.0, 0.0),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}
