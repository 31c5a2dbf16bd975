#![allow(clippy::needless_range_loop)]

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::types::{Axis, BellKind, Mat2, Outcome, PauliOp, Side, Sides};
use super::QsimError;

/// 4×4 complex matrix, row-major.
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_FLOOR: f64 = -1e-9;

/// Density matrix of one EPR pair in the ordered basis `{↑↑, ↑↓, ↓↑, ↓↓}`,
/// Alice's particle on the left.
///
/// Pairs never interact, so a register of pairs is just a list of these.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairState {
    rho: Mat4,
}

#[inline]
fn index(alice: usize, bob: usize) -> usize {
    2 * alice + bob
}

#[inline]
fn split(i: usize) -> (usize, usize) {
    (i / 2, i % 2)
}

/// Embeds a single-particle operator on the given side of the pair.
fn embed(side: Side, k: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        let (a, b) = split(i);
        for (j, e) in row.iter_mut().enumerate() {
            let (a2, b2) = split(j);
            *e = match side {
                Side::Alice if b == b2 => k[a][a2],
                Side::Bob if a == a2 => k[b][b2],
                _ => ZERO,
            };
        }
    }
    m
}

fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..4 {
                m[i][j] += aik * b[k][j];
            }
        }
    }
    m
}

fn adjoint(a: &Mat4) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[j][i].conj();
        }
    }
    m
}

impl PairState {
    /// Wraps a raw matrix after checking the density-matrix invariants.
    pub fn from_matrix(rho: Mat4) -> Result<PairState, QsimError> {
        let s = PairState { rho };
        s.validate()?;
        Ok(s)
    }

    pub fn pure(amplitudes: [Complex64; 4]) -> PairState {
        let mut rho = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        PairState { rho }
    }

    pub fn bell(kind: BellKind) -> PairState {
        PairState::pure(kind.amplitudes())
    }

    pub fn singlet() -> PairState {
        PairState::bell(BellKind::PsiMinus)
    }

    /// ¼·I
    pub fn maximally_mixed() -> PairState {
        let mut rho = [[ZERO; 4]; 4];
        for (i, row) in rho.iter_mut().enumerate() {
            row[i] = Complex64::new(0.25, 0.0);
        }
        PairState { rho }
    }

    /// Product of two spin eigenstates, `|left along left_axis⟩ ⊗ |right along right_axis⟩`.
    pub fn product(
        left: Outcome,
        left_axis: Axis,
        right: Outcome,
        right_axis: Axis,
    ) -> Result<PairState, QsimError> {
        for axis in [left_axis, right_axis] {
            let [x, y, z] = axis.components();
            let norm = (x * x + y * y + z * z).sqrt();
            if (norm - 1.0).abs() > super::types::UNIT_TOL {
                return Err(QsimError::NonUnitAxis { norm });
            }
        }
        let l = left_axis.projector(left);
        let r = right_axis.projector(right);
        let mut rho = [[ZERO; 4]; 4];
        for (i, row) in rho.iter_mut().enumerate() {
            let (a, b) = split(i);
            for (j, e) in row.iter_mut().enumerate() {
                let (a2, b2) = split(j);
                *e = l[a][a2] * r[b][b2];
            }
        }
        Ok(PairState { rho })
    }

    /// Arithmetic mean of the given states.
    pub fn mix_equal(states: &[PairState]) -> Result<PairState, QsimError> {
        if states.is_empty() {
            return Err(QsimError::EmptyMixture);
        }
        let w = 1.0 / states.len() as f64;
        let mut rho = [[ZERO; 4]; 4];
        for s in states {
            for i in 0..4 {
                for j in 0..4 {
                    rho[i][j] += s.rho[i][j] * w;
                }
            }
        }
        Ok(PairState { rho })
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.rho[i][i]).sum()
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += (self.rho[i][j] * self.rho[j][i]).re;
            }
        }
        acc
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = Matrix4::from_fn(|i, j| self.rho[i][j]);
        // symmetrize first so the solver sees an exactly Hermitian input
        let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<(), QsimError> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(QsimError::NotHermitian { error: herm });
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(QsimError::BadTrace { trace: tr.re });
        }
        let min = self.min_eigenvalue();
        if min < PSD_FLOOR {
            return Err(QsimError::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    /// Largest entrywise deviation from another state.
    pub fn max_abs_diff(&self, other: &PairState) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.rho[i][j] - other.rho[i][j]).norm());
            }
        }
        worst
    }

    /// Reduced 2×2 state of one particle.
    pub fn marginal(&self, side: Side) -> [[Complex64; 2]; 2] {
        let mut r = [[ZERO; 2]; 2];
        for (x, row) in r.iter_mut().enumerate() {
            for (y, e) in row.iter_mut().enumerate() {
                *e = (0..2)
                    .map(|t| match side {
                        Side::Alice => self.rho[index(x, t)][index(y, t)],
                        Side::Bob => self.rho[index(t, x)][index(t, y)],
                    })
                    .sum();
            }
        }
        r
    }

    /// `(U⊗I)ρ(U⊗I)†` or `(I⊗U)ρ(I⊗U)†`.
    pub fn apply_pauli(&self, side: Side, u: PauliOp) -> PairState {
        if u == PauliOp::Id {
            return self.clone();
        }
        let (cols, vals) = u.monomial();
        // row i of the embedded operator: single entry at col[i] with value val[i]
        let mut col = [0usize; 4];
        let mut val = [ZERO; 4];
        for i in 0..4 {
            let (a, b) = split(i);
            match side {
                Side::Alice => {
                    col[i] = index(cols[a], b);
                    val[i] = vals[a];
                }
                Side::Bob => {
                    col[i] = index(a, cols[b]);
                    val[i] = vals[b];
                }
            }
        }
        let mut rho = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = val[i] * self.rho[col[i]][col[j]] * val[j].conj();
            }
        }
        PairState { rho }
    }

    /// `(K⊗I)ρ(K⊗I)†` without renormalization.
    fn conjugate_local(&self, side: Side, k: &Mat2) -> Mat4 {
        let e = embed(side, k);
        mul(&mul(&e, &self.rho), &adjoint(&e))
    }

    /// Born probability of `outcome` for a spin measurement on one side.
    pub fn outcome_prob(&self, side: Side, axis: Axis, outcome: Outcome) -> f64 {
        let p = axis.projector(outcome);
        let r = self.marginal(side);
        let tr = p[0][0] * r[0][0] + p[0][1] * r[1][0] + p[1][0] * r[0][1] + p[1][1] * r[1][1];
        tr.re.clamp(0.0, 1.0)
    }

    /// Projective spin measurement on one particle; returns the outcome and
    /// the renormalized post-measurement pair state.
    pub fn measure_spin<R: Rng + ?Sized>(
        &self,
        side: Side,
        axis: Axis,
        rng: &mut R,
    ) -> (Outcome, PairState) {
        let p_up = self.outcome_prob(side, axis, Outcome::Up);
        let outcome = if rng.random::<f64>() < p_up {
            Outcome::Up
        } else {
            Outcome::Down
        };
        let post = self.collapse(side, axis, outcome);
        (outcome, post)
    }

    /// Post-measurement state for a given outcome. The outcome must have
    /// nonzero probability.
    pub fn collapse(&self, side: Side, axis: Axis, outcome: Outcome) -> PairState {
        let mut rho = self.conjugate_local(side, &axis.projector(outcome));
        let norm: f64 = (0..4).map(|i| rho[i][i].re).sum();
        debug_assert!(norm > 0.0, "collapse onto a zero-probability outcome");
        for row in rho.iter_mut() {
            for e in row.iter_mut() {
                *e /= norm;
            }
        }
        PairState { rho }
    }

    /// Exact probability that simultaneous measurements along `axis_a`
    /// (Alice) and `axis_b` (Bob) give opposite signs.
    pub fn anticorrelation_prob(&self, axis_a: Axis, axis_b: Axis) -> f64 {
        let mut total = 0.0;
        for s in [Outcome::Up, Outcome::Down] {
            let pa = axis_a.projector(s);
            let pb = axis_b.projector(s.flipped());
            // Tr((Pa⊗Pb)ρ) = Σ Pa[a][a'] Pb[b][b'] ρ[(a'b')][(ab)]
            let mut acc = ZERO;
            for a in 0..2 {
                for a2 in 0..2 {
                    for b in 0..2 {
                        for b2 in 0..2 {
                            acc += pa[a][a2] * pb[b][b2] * self.rho[index(a2, b2)][index(a, b)];
                        }
                    }
                }
            }
            total += acc.re;
        }
        total.clamp(0.0, 1.0)
    }

    /// Single-side depolarizing channel (uniform Pauli twirl with weight `p`);
    /// `Sides::Both` applies it to Alice then Bob.
    pub fn depolarize(&self, sides: Sides, p: f64) -> Result<PairState, QsimError> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(QsimError::ProbabilityOutOfRange { p });
        }
        Ok(match sides {
            Sides::Alice => self.depolarize_side(Side::Alice, p),
            Sides::Bob => self.depolarize_side(Side::Bob, p),
            Sides::Both => self
                .depolarize_side(Side::Alice, p)
                .depolarize_side(Side::Bob, p),
        })
    }

    fn depolarize_side(&self, side: Side, p: f64) -> PairState {
        if p == 0.0 {
            return self.clone();
        }
        let mut rho = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = self.rho[i][j] * (1.0 - p);
            }
        }
        for u in PauliOp::ALL {
            let t = self.apply_pauli(side, u);
            for i in 0..4 {
                for j in 0..4 {
                    rho[i][j] += t.rho[i][j] * (p / 4.0);
                }
            }
        }
        PairState { rho }
    }
}
