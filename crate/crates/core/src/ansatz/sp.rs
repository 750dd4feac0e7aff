use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Observable};
use super::params::{Angle, SymLayerParams};
use super::plan::SplitPlan;
use super::{ModelError, ModelKind, Qcnn};
use crate::qsim::{PauliString, PureState, QubitRing, StepKind};

/// One shared angle of an sp model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamId {
    pub level: usize,
    pub sublayer: usize,
    pub angle: Angle,
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.angle {
            Angle::Alpha => "alpha",
            Angle::Beta => "beta",
            Angle::Gamma => "gamma",
            Angle::Delta => "delta",
        };
        write!(f, "L{}.k{}.{a}", self.level, self.sublayer)
    }
}

/// Split plan plus one symmetric layer per splitting level. The last layer
/// acts on width-`p` branches and plays the role of the fully connected
/// layer.
#[derive(Debug, Clone, PartialEq)]
pub struct SpQcnnModel {
    plan: SplitPlan,
    layers: Vec<SymLayerParams>,
}

impl SpQcnnModel {
    pub fn new(plan: SplitPlan, layers: Vec<SymLayerParams>) -> Result<Self, ModelError> {
        if layers.len() != plan.n_layers() {
            return Err(ModelError::Plan(format!(
                "{} layer records for a plan with {} splitting levels",
                layers.len(),
                plan.n_layers()
            )));
        }
        Ok(Self { plan, layers })
    }

    pub fn zeros(plan: SplitPlan, depth: usize) -> Self {
        let layers = vec![SymLayerParams::zeros(depth); plan.n_layers()];
        Self { plan, layers }
    }

    pub fn random<R: Rng + ?Sized>(plan: SplitPlan, depth: usize, rng: &mut R) -> Self {
        let layers = (0..plan.n_layers()).map(|_| SymLayerParams::random(depth, rng)).collect();
        Self { plan, layers }
    }

    pub fn plan(&self) -> &SplitPlan {
        &self.plan
    }

    pub fn layers(&self) -> &[SymLayerParams] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [SymLayerParams] {
        &mut self.layers
    }

    pub fn readout(&self) -> usize {
        self.plan.readout()
    }

    fn offset(&self, level: usize) -> usize {
        self.layers[..level].iter().map(|l| l.n_params()).sum()
    }

    /// Flat index of `id` in [`Qcnn::params`].
    pub fn param_index(&self, id: ParamId) -> Result<usize, ModelError> {
        match self.layers.get(id.level) {
            Some(l) if id.sublayer < l.depth() => Ok(self.offset(id.level) + 4 * id.sublayer + id.angle.index()),
            _ => Err(ModelError::UnknownParam(id.to_string())),
        }
    }

    pub fn param_ids(&self) -> Vec<ParamId> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(level, l)| {
                (0..l.depth()).flat_map(move |sublayer| {
                    Angle::ALL.into_iter().map(move |angle| ParamId { level, sublayer, angle })
                })
            })
            .collect()
    }

    /// Gates sharing `id` within a single branch of its level.
    pub fn m_theta(&self, id: ParamId) -> usize {
        let ring = &self.plan.rings(id.level)[0];
        id.angle.step().generators(ring).len()
    }

    /// Circuit acting on every branch of every level.
    pub fn split_circuit(&self) -> Circuit {
        self.compile(|level| self.plan.rings(level))
    }

    /// Circuit acting only on the retained branch below level 0.
    pub fn nonsplit_circuit(&self) -> Circuit {
        self.compile(|level| std::slice::from_ref(self.plan.retained(level)))
    }

    fn compile<'a>(&'a self, rings_at: impl Fn(usize) -> &'a [QubitRing]) -> Circuit {
        let n = self.plan.n_qubits();
        let mut c = Circuit::new(n, self.n_params());
        for (level, layer) in self.layers.iter().enumerate() {
            let rings = rings_at(level);
            for k in 0..layer.depth() {
                for angle in Angle::ALL {
                    let param = self.offset(level) + 4 * k + angle.index();
                    let kind = angle.step();
                    if kind == StepKind::X {
                        let gates = rings
                            .iter()
                            .enumerate()
                            .flat_map(|(b, r)| r.qubits().iter().map(move |&q| (q, b)))
                            .collect();
                        c.push_x_batch(param, level, gates);
                    } else {
                        let gates: Vec<(PauliString, usize)> = rings
                            .iter()
                            .enumerate()
                            .flat_map(|(b, r)| kind.generators(r).into_iter().map(move |g| (g, b)))
                            .collect();
                        if !gates.is_empty() {
                            c.push_diagonal_batch(param, level, gates);
                        }
                    }
                }
            }
        }
        c
    }

    /// The same parameters viewed as a nonsplitting model.
    pub fn as_nonsplit(&self) -> Nonsplit {
        Nonsplit(self.clone())
    }
}

impl Qcnn for SpQcnnModel {
    fn kind(&self) -> ModelKind {
        ModelKind::SpQcnn
    }

    fn n_qubits(&self) -> usize {
        self.plan.n_qubits()
    }

    fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|l| l.flat()).collect()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<(), ModelError> {
        let expected = self.n_params();
        if params.len() != expected {
            return Err(ModelError::ParamCount { expected, got: params.len() });
        }
        let mut it = params.chunks_exact(4);
        for layer in &mut self.layers {
            let rows = (0..layer.depth()).map(|_| it.next().unwrap().try_into().unwrap()).collect();
            *layer = SymLayerParams::new(rows);
        }
        Ok(())
    }

    fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.n_params()).sum()
    }

    fn circuit(&self) -> Circuit {
        self.split_circuit()
    }

    fn observable(&self) -> Observable {
        Observable::Zavg
    }
}

/// Nonsplitting view of an sp model: one retained branch, single-qubit readout.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonsplit(pub SpQcnnModel);

impl Qcnn for Nonsplit {
    fn kind(&self) -> ModelKind {
        ModelKind::Nonsplit
    }

    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn params(&self) -> Vec<f64> {
        self.0.params()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<(), ModelError> {
        self.0.set_params(params)
    }

    fn n_params(&self) -> usize {
        self.0.n_params()
    }

    fn circuit(&self) -> Circuit {
        self.0.nonsplit_circuit()
    }

    fn observable(&self) -> Observable {
        Observable::Z(self.0.readout())
    }
}

pub fn forward_sp(model: &SpQcnnModel, input: &PureState) -> Result<PureState, ModelError> {
    model.check_input(input)?;
    Ok(model.split_circuit().output(&model.params(), input))
}

/// Output state of the nonsplitting circuit and its readout qubit.
pub fn forward_nonsplit(model: &SpQcnnModel, input: &PureState) -> Result<(PureState, usize), ModelError> {
    model.check_input(input)?;
    Ok((model.nonsplit_circuit().output(&model.params(), input), model.readout()))
}

/// Exact `⟨Z_avg⟩` of the split circuit.
pub fn output_zavg(model: &SpQcnnModel, input: &PureState) -> Result<f64, ModelError> {
    model.output(input)
}
