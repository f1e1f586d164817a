//! A fully assembled preparation task: basis, generators, initial state and
//! the target ground manifold.

use serde::{Deserialize, Serialize};

use crate::dynamics::{entanglement_entropy, fidelity, run_indexed, ActionSet};
use crate::error::{Error, Result};
use crate::linalg::{dot, CsrMatrix, EigOptions, C64};
use crate::lmg::{lmg_gauge_matrices, lmg_hamiltonian};
use crate::spin_ops::{build_matrix, canonical_label, catalog, ground_state, target_hamiltonian, GroundManifold, ModelKind, ModelSpec};
use crate::symmetry::{build_sector, SectorBasis, SymmetrySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    AllUp,
    AllDown,
    /// Alternating fully up and fully down sites.
    Neel,
}

impl InitialState {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::IsingHalf => InitialState::AllUp,
            ModelKind::IsingOne | ModelKind::Lmg => InitialState::AllDown,
            ModelKind::HeisenbergOne => InitialState::Neel,
        }
    }

    pub fn digits(self, n: usize, local_dim: usize) -> Vec<usize> {
        let down = local_dim - 1;
        match self {
            InitialState::AllUp => vec![0; n],
            InitialState::AllDown => vec![down; n],
            InitialState::Neel => (0..n).map(|i| if i % 2 == 0 { 0 } else { down }).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemOptions {
    /// Symmetry sector; chains default to zero momentum with even parity.
    pub sector: Option<SymmetrySpec>,
    pub initial: Option<InitialState>,
}

#[derive(Debug, Clone)]
pub struct ControlProblem {
    pub model: ModelSpec,
    pub basis: SectorBasis,
    pub hamiltonian: CsrMatrix,
    pub actions: ActionSet,
    pub initial: Vec<C64>,
    pub ground: GroundManifold,
}

/// Matrix of a label in the LMG multiplet.
fn lmg_matrix(label: &str, model: &ModelSpec) -> Result<CsrMatrix> {
    let n = model.n_sites;
    let (h1, h2) = lmg_hamiltonian(n, model.coupling("J")?)?;
    let [y, xy, zy] = lmg_gauge_matrices(n)?;
    Ok(match label {
        "H1" => h1,
        "H2" => h2,
        "Y" => y,
        "hatXY" => xy,
        "hatZY" => zy,
        _ => return Err(Error::Config(format!("label '{label}' is not available for the LMG model"))),
    })
}

impl ControlProblem {
    pub fn build(model: &ModelSpec, action_labels: &[&str], opts: &ProblemOptions) -> Result<Self> {
        model.validate()?;
        let lmg = model.kind == ModelKind::Lmg;
        let sector = opts.sector.unwrap_or(if lmg { SymmetrySpec::lmg() } else { SymmetrySpec::translation_parity() });
        if lmg != sector.permutation {
            return Err(Error::Config("the LMG model lives in the permutation-symmetric sector only".into()));
        }
        let basis = build_sector(model.n_sites, model.spin(), sector)?;
        let labels: Vec<String> = action_labels.iter().map(|l| canonical_label(l)).collect();
        let matrix = |label: &str| -> Result<CsrMatrix> {
            if lmg {
                lmg_matrix(label, model)
            } else {
                build_matrix(&catalog(label, model)?, &basis)
            }
        };
        let hamiltonian = if lmg {
            let h = model.coupling("h")?;
            CsrMatrix::linear_combination(&[(1.0, &matrix("H1")?), (h, &matrix("H2")?)])
        } else {
            build_matrix(&target_hamiltonian(model)?, &basis)?
        };
        let matrices = labels.iter().map(|l| matrix(l)).collect::<Result<Vec<_>>>()?;
        let actions = ActionSet::new(labels, matrices)?;
        let init = opts.initial.unwrap_or(InitialState::default_for(model.kind));
        let initial = basis.product_state(&init.digits(model.n_sites, model.spin().local_dim()))?;
        let ground = ground_state(&hamiltonian, EigOptions::default())?;
        Ok(Self { model: model.clone(), basis, hamiltonian, actions, initial, ground })
    }

    pub fn n_sites(&self) -> usize {
        self.model.n_sites
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground.energy()
    }

    pub fn evolve(&self, idx: &[usize], durations: &[f64]) -> Result<Vec<C64>> {
        run_indexed(idx, durations, &self.initial, &self.actions)
    }

    pub fn energy(&self, psi: &[C64]) -> f64 {
        dot(psi, &self.hamiltonian.matvec(psi)).re
    }

    pub fn energy_density(&self, psi: &[C64]) -> f64 {
        self.energy(psi) / self.n_sites() as f64
    }

    pub fn energy_ratio(&self, psi: &[C64]) -> f64 {
        self.energy(psi) / self.ground_energy()
    }

    pub fn fidelity(&self, psi: &[C64]) -> f64 {
        fidelity(psi, &self.ground.states)
    }

    /// Half-chain entropy when the basis allows it.
    pub fn entropy(&self, psi: &[C64]) -> Option<f64> {
        if self.basis.is_enumerated() && self.n_sites().is_multiple_of(2) {
            entanglement_entropy(psi, &self.basis).ok()
        } else {
            None
        }
    }

    /// Energy density and its gradient with respect to the durations, by
    /// back-propagating `H psi_q` through the sequence.
    pub fn energy_density_and_gradient(&self, idx: &[usize], durations: &[f64]) -> Result<(f64, Vec<f64>, Vec<C64>)> {
        let q = idx.len();
        let mut states = Vec::with_capacity(q + 1);
        states.push(self.initial.clone());
        for j in 0..q {
            let next = if durations[j] > 0.0 {
                crate::dynamics::expmv(&self.actions.matrices[idx[j]], durations[j], &states[j])?
            } else {
                states[j].clone()
            };
            states.push(next);
        }
        let psi = states[q].clone();
        let hpsi = self.hamiltonian.matvec(&psi);
        let e = dot(&psi, &hpsi).re;
        let mut chi = hpsi;
        let mut grad = vec![0.0; q];
        let nf = self.n_sites() as f64;
        for j in (0..q).rev() {
            let m = &self.actions.matrices[idx[j]];
            grad[j] = 2.0 * dot(&chi, &m.matvec(&states[j + 1])).im / nf;
            if j > 0 && durations[j] > 0.0 {
                chi = crate::linalg::expmv_signed(m, -durations[j], &chi, Default::default())?;
            }
        }
        Ok((e / nf, grad, psi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let model = ModelSpec::new(ModelKind::IsingOne, 4);
        let p = ControlProblem::build(&model, &["H1", "H2", "Y", "XY"], &ProblemOptions::default()).unwrap();
        let idx = [0, 2, 1, 3, 0];
        let a = [0.3, 0.7, 0.2, 0.5, 0.4];
        let (_, g, _) = p.energy_density_and_gradient(&idx, &a).unwrap();
        for j in 0..a.len() {
            let h = 1e-5;
            let mut ap = a;
            ap[j] += h;
            let mut am = a;
            am[j] -= h;
            let ep = p.energy_density(&p.evolve(&idx, &ap).unwrap());
            let em = p.energy_density(&p.evolve(&idx, &am).unwrap());
            let fd = (ep - em) / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-7, "j={j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn lmg_problem_dimensions() {
        let model = ModelSpec::new(ModelKind::Lmg, 51);
        let p = ControlProblem::build(&model, &["H1", "H2", "Y", "X\u{302}Y", "hatZY"], &ProblemOptions::default()).unwrap();
        assert_eq!(p.actions.dim(), 52);
        assert!(p.ground.degenerate());
    }
}
