//! sp3 nearest-neighbour tight-binding model of diamond-lattice silicon.
//!
//! Wave vectors are expressed in units of 2π/a throughout, so a k-point
//! `[1, 0, 0]` is the X point and `[0.5, 0.5, 0.5]` is L. Bond vectors
//! are the four tetrahedral neighbours of the A atom, `(a/4)(±1, ±1, ±1)`
//! with an even number of minus signs.
//!
//! Each tabulated hopping constant is the full four-neighbour matrix
//! element at Γ, so the structure factors below carry a factor of 1/4.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise tolerance used when checking Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Diagonal value used to pad a matrix up to the next power of two.
///
/// Padded states sit far above every physical band so a variational
/// search never lands on them.
pub const PADDING_SENTINEL: f64 = 1.0e3;

/// Sign pattern of the four nearest-neighbour bond vectors in units of a/4.
const BONDS: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

/// On-site energies and nearest-neighbour hopping integrals (eV, Å).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TbParameters {
    pub lattice_constant: f64,
    #[serde(rename = "E_s")]
    pub e_s: f64,
    #[serde(rename = "E_p")]
    pub e_p: f64,
    #[serde(rename = "V_ss")]
    pub v_ss: f64,
    #[serde(rename = "V_sp")]
    pub v_sp: f64,
    #[serde(rename = "V_xx")]
    pub v_xx: f64,
    #[serde(rename = "V_xy")]
    pub v_xy: f64,
}

impl TbParameters {
    /// Reference-derived silicon values (E_p − E_s = 7.20 eV).
    ///
    /// The zero of energy is arbitrary; only the internal consistency of
    /// the model is relied upon.
    pub fn silicon() -> Self {
        Self {
            lattice_constant: 5.431,
            e_s: -4.20,
            e_p: 3.00,
            v_ss: -8.13,
            v_sp: 5.88,
            v_xx: 3.17,
            v_xy: 7.51,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lattice_constant.is_finite() && self.lattice_constant > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "lattice constant must be positive, got {}",
                self.lattice_constant
            )));
        }
        let energies = [self.e_s, self.e_p, self.v_ss, self.v_sp, self.v_xx, self.v_xy];
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameters(
                "all energies must be finite".into(),
            ));
        }
        Ok(())
    }
}

impl Default for TbParameters {
    fn default() -> Self {
        Self::silicon()
    }
}

/// A wave vector in units of 2π/a, optionally carrying a symmetry label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPoint {
    pub frac: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl KPoint {
    pub fn new(frac: [f64; 3]) -> Self {
        Self { frac, label: None }
    }

    pub fn labeled(frac: [f64; 3], label: &str) -> Self {
        Self {
            frac,
            label: Some(label.to_string()),
        }
    }

    pub fn gamma() -> Self {
        Self::labeled([0.0, 0.0, 0.0], "Γ")
    }

    /// X = (2π/a)(1, 0, 0).
    pub fn x() -> Self {
        Self::labeled([1.0, 0.0, 0.0], "X")
    }

    /// L = (π/a)(1, 1, 1).
    pub fn l() -> Self {
        Self::labeled([0.5, 0.5, 0.5], "L")
    }

    /// W = (2π/a)(1, 1/2, 0).
    pub fn w() -> Self {
        Self::labeled([1.0, 0.5, 0.0], "W")
    }

    /// K = (2π/a)(3/4, 3/4, 0).
    pub fn k() -> Self {
        Self::labeled([0.75, 0.75, 0.0], "K")
    }

    /// Looks up a high-symmetry point by name (`G`/`Γ`, `X`, `L`, `W`, `K`).
    pub fn named(name: &str) -> Option<Self> {
        match name.trim() {
            "G" | "Γ" | "Gamma" | "GAMMA" | "gamma" => Some(Self::gamma()),
            "X" => Some(Self::x()),
            "L" => Some(Self::l()),
            "W" => Some(Self::w()),
            "K" => Some(Self::k()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.frac.iter().all(|c| c.is_finite())
    }

    fn distance(&self, other: &KPoint) -> f64 {
        self.frac
            .iter()
            .zip(other.frac.iter())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Ordered k-points with a cumulative path-length coordinate (units of 2π/a).
#[derive(Debug, Clone, PartialEq)]
pub struct KPath {
    pub points: Vec<KPoint>,
    /// Index into `points` of every anchor, first and last included.
    pub segment_boundaries: Vec<usize>,
    pub coordinates: Vec<f64>,
}

impl KPath {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Linear interpolation through `anchors`, `points_per_segment` steps per leg.
///
/// Junction points are shared between neighbouring segments, so a path
/// through `m` anchors holds `(m - 1) * points_per_segment + 1` points.
pub fn make_kpath(anchors: &[KPoint], points_per_segment: usize) -> Result<KPath> {
    if anchors.len() < 2 {
        return Err(Error::InvalidKPath(format!(
            "need at least two anchors, got {}",
            anchors.len()
        )));
    }
    if points_per_segment == 0 {
        return Err(Error::InvalidKPath(
            "points per segment must be at least 1".into(),
        ));
    }
    if let Some(bad) = anchors.iter().find(|k| !k.is_finite()) {
        return Err(Error::InvalidKPath(format!(
            "non-finite anchor {:?}",
            bad.frac
        )));
    }

    let mut points = vec![anchors[0].clone()];
    let mut coordinates = vec![0.0];
    let mut segment_boundaries = vec![0];
    for pair in anchors.windows(2) {
        let (start, end) = (&pair[0], &pair[1]);
        for step in 1..=points_per_segment {
            let t = step as f64 / points_per_segment as f64;
            let point = if step == points_per_segment {
                end.clone()
            } else {
                let mut frac = [0.0; 3];
                for (c, (a, b)) in frac.iter_mut().zip(start.frac.iter().zip(end.frac.iter())) {
                    *c = a + t * (b - a);
                }
                KPoint::new(frac)
            };
            let last = points.last().expect("path is never empty");
            coordinates.push(coordinates.last().unwrap() + last.distance(&point));
            points.push(point);
        }
        segment_boundaries.push(points.len() - 1);
    }
    Ok(KPath {
        points,
        segment_boundaries,
        coordinates,
    })
}

/// Dense Bloch Hamiltonian at a single k-point (eV).
#[derive(Debug, Clone, PartialEq)]
pub struct BlochHamiltonian {
    pub matrix: DMatrix<Complex64>,
    pub kpoint: Option<KPoint>,
}

impl BlochHamiltonian {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let h = Self {
            matrix,
            kpoint: None,
        };
        h.check_hermitian(HERMITIAN_TOL)?;
        Ok(h)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let matrix = DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self {
            matrix,
            kpoint: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entrywise deviation from Hermiticity, `max |H - H†|`.
    pub fn hermitian_residual(&self) -> f64 {
        let m = &self.matrix;
        if m.nrows() != m.ncols() {
            return f64::INFINITY;
        }
        let n = m.nrows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        if self.matrix.nrows() != self.matrix.ncols() {
            return Err(Error::NotSquare {
                rows: self.matrix.nrows(),
                cols: self.matrix.ncols(),
            });
        }
        let residual = self.hermitian_residual();
        if residual > tol {
            return Err(Error::NotHermitian { residual, tol });
        }
        Ok(())
    }

    /// Gershgorin upper bound on the spectrum: `max_i Re H_ii + Σ_{j≠i} |H_ij|`.
    pub fn gershgorin_upper_bound(&self) -> f64 {
        let m = &self.matrix;
        (0..m.nrows())
            .map(|r| {
                let off: f64 = (0..m.ncols())
                    .filter(|&c| c != r)
                    .map(|c| m[(r, c)].norm())
                    .sum();
                m[(r, r)].re + off
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pads to the next power-of-two dimension with [`PADDING_SENTINEL`]
    /// on the new diagonal entries. A power-of-two input is returned as is.
    pub fn padded_to_power_of_two(&self) -> Self {
        let n = self.dim();
        let target = n.next_power_of_two().max(1);
        if target == n {
            return self.clone();
        }
        let mut matrix = DMatrix::from_element(target, target, Complex64::new(0.0, 0.0));
        matrix.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        for i in n..target {
            matrix[(i, i)] = Complex64::new(PADDING_SENTINEL, 0.0);
        }
        Self {
            matrix,
            kpoint: self.kpoint.clone(),
        }
    }
}

/// Normalised structure factors `g0..g3` at `k`.
///
/// `g0` is the plain phase sum over the four bonds; `g1`, `g2`, `g3`
/// weight each bond by the sign of its x, y or z component.
pub fn structure_factors(k: &KPoint) -> [Complex64; 4] {
    let mut g = [Complex64::new(0.0, 0.0); 4];
    for bond in BONDS.iter() {
        // k·d = (2π/a)(a/4)(k_frac·s) = (π/2)(k_frac·s)
        let phase = FRAC_PI_2 * (k.frac[0] * bond[0] + k.frac[1] * bond[1] + k.frac[2] * bond[2]);
        let e = Complex64::from_polar(0.25, phase);
        g[0] += e;
        g[1] += e * bond[0];
        g[2] += e * bond[1];
        g[3] += e * bond[2];
    }
    g
}

/// Full 8×8 Bloch Hamiltonian in the basis (A: s, px, py, pz, B: s, px, py, pz).
pub fn build_full_hamiltonian(params: &TbParameters, k: &KPoint) -> Result<BlochHamiltonian> {
    params.validate()?;
    if !k.is_finite() {
        return Err(Error::InvalidKPath(format!("non-finite k-point {:?}", k.frac)));
    }
    let [g0, g1, g2, g3] = structure_factors(k);
    let zero = Complex64::new(0.0, 0.0);
    let mut h = DMatrix::from_element(8, 8, zero);
    for i in 0..2 {
        let o = 4 * i;
        h[(o, o)] = Complex64::new(params.e_s, 0.0);
        for p in 1..4 {
            h[(o + p, o + p)] = Complex64::new(params.e_p, 0.0);
        }
    }

    // A-row, B-column block; p index 1..3 = x, y, z.
    let g_axis = [g1, g2, g3];
    let mut ab = [[zero; 4]; 4];
    ab[0][0] = g0 * params.v_ss;
    for a in 0..3 {
        ab[0][a + 1] = g_axis[a] * params.v_sp;
        ab[a + 1][0] = -g_axis[a] * params.v_sp;
        ab[a + 1][a + 1] = g0 * params.v_xx;
    }
    // x–y couples through the z sign pattern, x–z through y, y–z through x.
    let cross = [(0, 1, g3), (0, 2, g2), (1, 2, g1)];
    for &(a, b, g) in cross.iter() {
        ab[a + 1][b + 1] = g * params.v_xy;
        ab[b + 1][a + 1] = g * params.v_xy;
    }
    for r in 0..4 {
        for c in 0..4 {
            h[(r, 4 + c)] = ab[r][c];
            h[(4 + c, r)] = ab[r][c].conj();
        }
    }
    Ok(BlochHamiltonian {
        matrix: h,
        kpoint: Some(k.clone()),
    })
}

/// 2×2 s-orbital block (A:s, B:s) obtained when s–p hopping is neglected.
pub fn build_s_block(params: &TbParameters, k: &KPoint) -> Result<BlochHamiltonian> {
    params.validate()?;
    if !k.is_finite() {
        return Err(Error::InvalidKPath(format!("non-finite k-point {:?}", k.frac)));
    }
    let g0 = structure_factors(k)[0];
    let es = Complex64::new(params.e_s, 0.0);
    let hop = g0 * params.v_ss;
    let matrix = DMatrix::from_row_slice(2, 2, &[es, hop, hop.conj(), es]);
    Ok(BlochHamiltonian {
        matrix,
        kpoint: Some(k.clone()),
    })
}

/// Ascending real spectrum of a Hermitian matrix, multiplicities repeated.
pub fn diagonalize_classical(h: &BlochHamiltonian) -> Result<Vec<f64>> {
    // Loose enough to accept matrices assembled from rounded coefficients.
    h.check_hermitian(1e-9)?;
    let eig = SymmetricEigen::new(h.matrix.clone());
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    Ok(values)
}
