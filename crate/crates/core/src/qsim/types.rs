use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};

use super::QsimError;

pub(crate) type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which particle of a pair an operation acts on.
///
/// Alice's particle is the left tensor factor in the basis
/// `{↑↑, ↑↓, ↓↑, ↓↓}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Alice,
    Bob,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Alice => Side::Bob,
            Side::Bob => Side::Alice,
        }
    }
}

/// Target of a noise channel: one particle or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sides {
    Alice,
    Bob,
    Both,
}

impl From<Side> for Sides {
    fn from(side: Side) -> Self {
        match side {
            Side::Alice => Sides::Alice,
            Side::Bob => Sides::Bob,
        }
    }
}

/// The four maximally entangled pair states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    /// The singlet.
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiMinus,
        BellKind::PsiPlus,
        BellKind::PhiMinus,
        BellKind::PhiPlus,
    ];

    /// Amplitudes in the basis `{↑↑, ↑↓, ↓↑, ↓↓}`.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            BellKind::PsiMinus => [ZERO, h, -h, ZERO],
            BellKind::PsiPlus => [ZERO, h, h, ZERO],
            BellKind::PhiMinus => [h, ZERO, ZERO, -h],
            BellKind::PhiPlus => [h, ZERO, ZERO, h],
        }
    }
}

/// Single-particle Pauli operators, each its own inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    Id,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::Id, PauliOp::X, PauliOp::Y, PauliOp::Z];

    pub fn matrix(self) -> Mat2 {
        match self {
            PauliOp::Id => [[ONE, ZERO], [ZERO, ONE]],
            PauliOp::X => [[ZERO, ONE], [ONE, ZERO]],
            PauliOp::Y => [[ZERO, -I], [I, ZERO]],
            PauliOp::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// Monomial form: row `r` has its single nonzero entry at column
    /// `cols[r]` with value `vals[r]`.
    pub(crate) fn monomial(self) -> ([usize; 2], [Complex64; 2]) {
        match self {
            PauliOp::Id => ([0, 1], [ONE, ONE]),
            PauliOp::X => ([1, 0], [ONE, ONE]),
            PauliOp::Y => ([1, 0], [-I, I]),
            PauliOp::Z => ([0, 1], [ONE, -ONE]),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> PauliOp {
        PauliOp::ALL[rng.random_range(0..4)]
    }

    /// Heisenberg-picture action on a measurement axis: `U† (n·σ) U = (n'·σ)`.
    pub fn conjugate_axis(self, axis: Axis) -> Axis {
        let [x, y, z] = axis.components();
        let v = match self {
            PauliOp::Id => [x, y, z],
            PauliOp::X => [x, -y, -z],
            PauliOp::Y => [-x, y, -z],
            PauliOp::Z => [-x, -y, z],
        };
        Axis { v }
    }

    /// Whether conjugation by this Pauli reverses the given axis.
    ///
    /// `None` when the axis is neither preserved nor reversed (only happens
    /// for axes off the coordinate directions).
    pub fn reverses(self, axis: Axis) -> Option<bool> {
        let c = self.conjugate_axis(axis);
        if c.same_as(&axis) {
            Some(false)
        } else if c.same_as(&axis.reversed()) {
            Some(true)
        } else {
            None
        }
    }
}

/// Unit measurement direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Axis {
    v: [f64; 3],
}

pub(crate) const UNIT_TOL: f64 = 1e-12;
const SAME_AXIS_TOL: f64 = 1e-9;

impl Axis {
    pub const X: Axis = Axis { v: [1.0, 0.0, 0.0] };
    pub const Y: Axis = Axis { v: [0.0, 1.0, 0.0] };
    pub const Z: Axis = Axis { v: [0.0, 0.0, 1.0] };

    /// Accepts only vectors already of unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Axis, QsimError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(QsimError::NonUnitAxis { norm });
        }
        Ok(Axis { v: [x, y, z] })
    }

    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Axis, QsimError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(QsimError::NonUnitAxis { norm });
        }
        Ok(Axis {
            v: [x / norm, y / norm, z / norm],
        })
    }

    /// Uniform direction on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Axis {
        let v: [f64; 3] = UnitSphere.sample(rng);
        Axis::normalized(v[0], v[1], v[2]).unwrap_or(Axis::Z)
    }

    /// X or Z with equal probability.
    pub fn random_xz<R: Rng + ?Sized>(rng: &mut R) -> Axis {
        if rng.random_bool(0.5) {
            Axis::X
        } else {
            Axis::Z
        }
    }

    pub fn components(&self) -> [f64; 3] {
        self.v
    }

    pub fn reversed(&self) -> Axis {
        Axis {
            v: [-self.v[0], -self.v[1], -self.v[2]],
        }
    }

    pub fn dot(&self, other: &Axis) -> f64 {
        self.v.iter().zip(other.v.iter()).map(|(a, b)| a * b).sum()
    }

    /// Direction equality within 1e-9.
    pub fn same_as(&self, other: &Axis) -> bool {
        self.v
            .iter()
            .zip(other.v.iter())
            .all(|(a, b)| (a - b).abs() <= SAME_AXIS_TOL)
    }

    /// `n·σ` as a 2×2 matrix.
    pub(crate) fn sigma(&self) -> Mat2 {
        let [x, y, z] = self.v;
        [
            [Complex64::new(z, 0.0), Complex64::new(x, -y)],
            [Complex64::new(x, y), Complex64::new(-z, 0.0)],
        ]
    }

    /// Spectral projector `(1 ± n·σ)/2` for the given outcome.
    pub(crate) fn projector(&self, outcome: Outcome) -> Mat2 {
        let s = outcome.sign() as f64;
        let sig = self.sigma();
        let mut p = [[ZERO; 2]; 2];
        for (r, row) in p.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                let id = if r == c { 1.0 } else { 0.0 };
                *e = (Complex64::new(id, 0.0) + sig[r][c] * s) * 0.5;
            }
        }
        p
    }
}

impl TryFrom<[f64; 3]> for Axis {
    type Error = QsimError;

    fn try_from(v: [f64; 3]) -> Result<Self, Self::Error> {
        Axis::new(v[0], v[1], v[2])
    }
}

impl From<Axis> for [f64; 3] {
    fn from(a: Axis) -> Self {
        a.v
    }
}

/// Spin measurement result along some axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// +1: up along the axis ("up" for Z, "right" for X).
    Up,
    /// −1
    Down,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Up => 1,
            Outcome::Down => -1,
        }
    }

    /// Public symbol coding: up/right → 1, down/left → 0.
    pub fn symbol(self) -> u8 {
        match self {
            Outcome::Up => 1,
            Outcome::Down => 0,
        }
    }

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Up => Outcome::Down,
            Outcome::Down => Outcome::Up,
        }
    }

    pub fn from_symbol(symbol: u8) -> Outcome {
        if symbol == 0 {
            Outcome::Down
        } else {
            Outcome::Up
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut m = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        m
    }

    #[test]
    fn paulis_are_self_inverse() {
        for u in PauliOp::ALL {
            let sq = mat_mul(&u.matrix(), &u.matrix());
            assert!((sq[0][0] - ONE).norm() < 1e-15);
            assert!((sq[1][1] - ONE).norm() < 1e-15);
            assert!(sq[0][1].norm() < 1e-15 && sq[1][0].norm() < 1e-15);
        }
    }

    #[test]
    fn monomial_matches_matrix() {
        for u in PauliOp::ALL {
            let m = u.matrix();
            let (cols, vals) = u.monomial();
            for (r, row) in m.iter().enumerate() {
                for (c, &entry) in row.iter().enumerate() {
                    let want = if cols[r] == c { vals[r] } else { ZERO };
                    assert_eq!(entry, want, "{u:?} [{r}][{c}]");
                }
            }
        }
    }

    #[test]
    fn conjugate_axis_matches_matrices() {
        // U† (n·σ) U computed directly
        let axes = [
            Axis::X,
            Axis::Y,
            Axis::Z,
            Axis::normalized(0.3, -0.4, 0.5).unwrap(),
        ];
        for u in PauliOp::ALL {
            for a in axes {
                let m = u.matrix();
                let direct = mat_mul(&mat_mul(&m, &a.sigma()), &m);
                let via = u.conjugate_axis(a).sigma();
                for r in 0..2 {
                    for c in 0..2 {
                        assert!((direct[r][c] - via[r][c]).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn reverses_on_coordinate_axes() {
        assert_eq!(PauliOp::X.reverses(Axis::Z), Some(true));
        assert_eq!(PauliOp::Y.reverses(Axis::Z), Some(true));
        assert_eq!(PauliOp::Z.reverses(Axis::Z), Some(false));
        assert_eq!(PauliOp::Z.reverses(Axis::X), Some(true));
        assert_eq!(PauliOp::Id.reverses(Axis::X), Some(false));
        let oblique = Axis::normalized(1.0, 0.0, 1.0).unwrap();
        assert_eq!(PauliOp::X.reverses(oblique), None);
    }

    #[test]
    fn axis_rejects_non_unit() {
        assert!(Axis::new(1.0, 1.0, 0.0).is_err());
        assert!(Axis::new(0.0, 0.0, 1.0 + 1e-9).is_err());
        assert!(Axis::normalized(0.0, 0.0, 0.0).is_err());
        assert!(Axis::new(0.6, 0.8, 0.0).is_ok());
    }

    #[test]
    fn axis_serializes_as_triple() {
        let json = serde_json::to_string(&Axis::X).unwrap();
        assert_eq!(json, "[1.0,0.0,0.0]");
        assert!(serde_json::from_str::<Axis>("[1.0,1.0,0.0]").is_err());
    }

    #[test]
    fn symbol_coding() {
        assert_eq!(Outcome::Up.symbol(), 1);
        assert_eq!(Outcome::Down.symbol(), 0);
        assert_eq!(Outcome::from_symbol(1), Outcome::Up);
    }
}
