use num_complex::Complex64;

use super::{build_h1, OperatorSet, SystemParams};
use crate::linalg::{ComplexMatrix, SparseOperator};

/// How the active cavity's gain enters the generator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GainModel {
    /// `−κ₂𝓛[a₂]`: a loss channel with negative rate, taken literally.
    #[default]
    SignedLoss,
    /// `+κ₂𝓛[a₂†]` when `κ₂ > 0` (incoherent pumping). For `κ₂ ≤ 0` both
    /// models coincide.
    Incoherent,
}

impl GainModel {
    pub fn name(self) -> &'static str {
        match self {
            GainModel::SignedLoss => "signed_loss",
            GainModel::Incoherent => "incoherent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "signed_loss" => Some(GainModel::SignedLoss),
            "incoherent" => Some(GainModel::Incoherent),
            _ => None,
        }
    }
}

/// One dissipator `rate · 𝓛[op]`; `rate` may be negative.
#[derive(Clone, Debug)]
pub struct JumpChannel {
    pub rate: f64,
    pub op: SparseOperator,
}

/// `ρ ↦ −i[H₁,ρ] + Σ_k r_k 𝓛[c_k]ρ`, stored as
/// `Aρ + ρA† + Σ_k r_k c_k ρ c_k†` with `A = −iH₁ − ½Σ_k r_k c_k†c_k`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    hamiltonian: ComplexMatrix,
    a_eff: ComplexMatrix,
    a_sparse: SparseOperator,
    channels: Vec<JumpChannel>,
    gain_model: GainModel,
}

impl Liouvillian {
    pub fn new(p: &SystemParams, ops: &OperatorSet, gain_model: GainModel) -> Self {
        let h = build_h1(p, ops);
        let mut dense: Vec<(f64, ComplexMatrix)> = vec![(p.kappa1, ops.a1.clone())];
        match gain_model {
            GainModel::Incoherent if p.kappa2 > 0.0 => dense.push((p.kappa2, ops.a2.dagger())),
            _ => dense.push((-p.kappa2, ops.a2.clone())),
        }
        dense.push((p.gamma_m * (p.n_th + 1.0), ops.b.clone()));
        dense.push((p.gamma_m * p.n_th, ops.b.dagger()));
        dense.retain(|(r, _)| *r != 0.0);

        let mut a_eff = h.scale(Complex64::new(0.0, -1.0));
        for (rate, c) in &dense {
            let cdc = c.dagger().matmul(c).expect("same space");
            a_eff.axpy(Complex64::new(-0.5 * rate, 0.0), &cdc).expect("same space");
        }
        let channels = dense
            .iter()
            .map(|(rate, c)| JumpChannel {
                rate: *rate,
                op: SparseOperator::from_dense(c),
            })
            .collect();
        Self {
            dim: ops.dimension(),
            a_sparse: SparseOperator::from_dense(&a_eff),
            hamiltonian: h,
            a_eff,
            channels,
            gain_model,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    /// `A = −iH₁ − ½Σ r_k c_k†c_k`; the Liouvillian without the jump terms
    /// is `ρ ↦ Aρ + ρA†`.
    pub fn a_effective(&self) -> &ComplexMatrix {
        &self.a_eff
    }

    pub fn channels(&self) -> &[JumpChannel] {
        &self.channels
    }

    pub fn gain_model(&self) -> GainModel {
        self.gain_model
    }

    /// Writes `L(ρ)` into `out`; both are row-major `dim × dim`.
    pub fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let one = Complex64::new(1.0, 0.0);
        self.a_sparse.left_mul_acc(one, rho, out);
        self.a_sparse.right_mul_dagger_acc(one, rho, out);
        for ch in &self.channels {
            ch.op.sandwich_acc(Complex64::new(ch.rate, 0.0), rho, out);
        }
    }

    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        self.apply(rho.as_slice(), out.as_mut_slice());
        out
    }
}

/// Generator of the master equation with the gain taken literally as a
/// negative-rate loss channel on cavity 2.
pub fn make_liouvillian(p: &SystemParams, ops: &OperatorSet) -> Liouvillian {
    Liouvillian::new(p, ops, GainModel::SignedLoss)
}
