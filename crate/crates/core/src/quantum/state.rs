use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Float;

use super::hermitian::hermitian_eigenvalues;
use super::QuantumError;

/// Computational-basis label: one digit per coordinate.
pub type Label = Vec<u16>;

/// Tolerance for internal consistency checks: `1e-12`, loosened to a few
/// ulps for low-precision scalars.
pub fn internal_tolerance<R: Float>() -> R {
    let floor = R::from(1e-12).expect("representable");
    floor.max(R::epsilon() * R::from(64.0).expect("representable"))
}

pub(crate) fn real<R: Float>(x: f64) -> R {
    R::from(x).expect("finite constant is representable")
}

/// A normalized pure state stored as a sparse map from basis labels to
/// amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<R> {
    dims: Vec<usize>,
    amplitudes: BTreeMap<Label, Complex<R>>,
}

impl<R: Float> QuantumState<R> {
    /// Validates label arity, digit ranges and normalization. Exact zeros
    /// are dropped.
    pub fn new(
        dims: Vec<usize>,
        amplitudes: BTreeMap<Label, Complex<R>>,
    ) -> Result<Self, QuantumError> {
        for label in amplitudes.keys() {
            if label.len() != dims.len() {
                return Err(QuantumError::LabelArity {
                    expected: dims.len(),
                    actual: label.len(),
                });
            }
            if label.iter().zip(&dims).any(|(&x, &d)| usize::from(x) >= d) {
                return Err(QuantumError::LabelOutOfRange);
            }
        }
        let state = QuantumState {
            dims,
            amplitudes: amplitudes
                .into_iter()
                .filter(|(_, a)| a.re != R::zero() || a.im != R::zero())
                .collect(),
        };
        let norm = state.norm_sqr();
        if (norm - R::one()).abs() > internal_tolerance::<R>() {
            return Err(QuantumError::Normalization {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(state)
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(
        dims: Vec<usize>,
        amplitudes: BTreeMap<Label, Complex<R>>,
    ) -> Result<Self, QuantumError> {
        let norm = amplitudes
            .values()
            .fold(R::zero(), |acc, a| acc + a.norm_sqr())
            .sqrt();
        if norm == R::zero() {
            return Err(QuantumError::Normalization { norm: 0.0 });
        }
        let scaled = amplitudes.into_iter().map(|(l, a)| (l, a / norm)).collect();
        Self::new(dims, scaled)
    }

    /// `|k⟩` on a single coordinate of dimension `dim`.
    pub fn basis(dim: usize, k: u16) -> Result<Self, QuantumError> {
        Self::new(
            vec![dim],
            BTreeMap::from([(vec![k], Complex::new(R::one(), R::zero()))]),
        )
    }

    /// Single-coordinate state with the given (normalized) amplitude vector.
    pub fn from_amplitudes(amps: &[Complex<R>]) -> Result<Self, QuantumError> {
        let map = amps
            .iter()
            .enumerate()
            .map(|(k, &a)| (vec![k as u16], a))
            .collect();
        Self::new(vec![amps.len()], map)
    }

    pub(crate) fn from_parts_unchecked(
        dims: Vec<usize>,
        amplitudes: BTreeMap<Label, Complex<R>>,
    ) -> Self {
        QuantumState { dims, amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &BTreeMap<Label, Complex<R>> {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: &[u16]) -> Complex<R> {
        self.amplitudes
            .get(label)
            .copied()
            .unwrap_or_else(|| Complex::new(R::zero(), R::zero()))
    }

    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> R {
        self.amplitudes
            .values()
            .fold(R::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState<R>) -> Result<Complex<R>, QuantumError> {
        if self.dims != other.dims {
            return Err(QuantumError::DimensionMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .fold(Complex::new(R::zero(), R::zero()), |acc, (l, a)| {
                acc + a.conj() * other.amplitude(l)
            }))
    }

    /// Applies a bijection on basis labels. The caller guarantees
    /// injectivity; collisions are reported as an error.
    pub fn relabel<F: FnMut(&[u16]) -> Label>(&self, mut f: F) -> Result<Self, QuantumError> {
        let mut out = BTreeMap::new();
        for (l, &a) in &self.amplitudes {
            if out.insert(f(l), a).is_some() {
                return Err(QuantumError::NotABijection);
            }
        }
        Ok(QuantumState {
            dims: self.dims.clone(),
            amplitudes: out,
        })
    }

    pub fn tensor(&self, other: &QuantumState<R>) -> QuantumState<R> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amplitudes = BTreeMap::new();
        for (l1, &a1) in &self.amplitudes {
            for (l2, &a2) in &other.amplitudes {
                let mut l = l1.clone();
                l.extend_from_slice(l2);
                amplitudes.insert(l, a1 * a2);
            }
        }
        QuantumState { dims, amplitudes }
    }
}

/// A density matrix restricted to the basis labels it is supported on;
/// entries outside `basis × basis` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<R> {
    dims: Vec<usize>,
    basis: Vec<Label>,
    data: Vec<Complex<R>>,
}

impl<R: Float> DensityMatrix<R> {
    /// `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &QuantumState<R>) -> Self {
        let basis: Vec<Label> = psi.amplitudes.keys().cloned().collect();
        let amps: Vec<Complex<R>> = psi.amplitudes.values().copied().collect();
        let k = basis.len();
        let mut data = Vec::with_capacity(k * k);
        for a in &amps {
            for b in &amps {
                data.push(*a * b.conj());
            }
        }
        DensityMatrix {
            dims: psi.dims.clone(),
            basis,
            data,
        }
    }

    /// Coordinate dimensions of the space the matrix acts on.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension of the full space (product of coordinate dimensions).
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn support(&self) -> &[Label] {
        &self.basis
    }

    pub fn entry(&self, row: &[u16], col: &[u16]) -> Complex<R> {
        match (self.index(row), self.index(col)) {
            (Some(i), Some(j)) => self.data[i * self.basis.len() + j],
            _ => Complex::new(R::zero(), R::zero()),
        }
    }

    fn index(&self, label: &[u16]) -> Option<usize> {
        self.basis
            .binary_search_by(|b| b.as_slice().cmp(label))
            .ok()
    }

    pub fn trace(&self) -> Complex<R> {
        let k = self.basis.len();
        (0..k).fold(Complex::new(R::zero(), R::zero()), |acc, i| {
            acc + self.data[i * k + i]
        })
    }

    /// `tr(ρ²)`; 1 exactly for pure states.
    pub fn purity(&self) -> R {
        // ρ Hermitian: tr(ρ²) = Σ |ρ_ij|².
        self.data
            .iter()
            .fold(R::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn is_hermitian(&self, tol: R) -> bool {
        let k = self.basis.len();
        (0..k).all(|i| {
            (0..k).all(|j| (self.data[i * k + j] - self.data[j * k + i].conj()).norm() <= tol)
        })
    }

    pub fn eigenvalues(&self) -> Vec<R> {
        hermitian_eigenvalues(&self.data, self.basis.len())
    }

    /// Hermitian, unit trace, and no eigenvalue below `-tol`.
    pub fn is_valid_state(&self, tol: R) -> bool {
        self.is_hermitian(tol)
            && (self.trace() - Complex::new(R::one(), R::zero())).norm() <= tol
            && self.eigenvalues().iter().all(|&l| l >= -tol)
    }

    /// `self - other` over the union of both supports.
    fn difference(
        &self,
        other: &DensityMatrix<R>,
    ) -> Result<(Vec<Label>, Vec<Complex<R>>), QuantumError> {
        if self.dims != other.dims {
            return Err(QuantumError::DimensionMismatch);
        }
        let mut basis: Vec<Label> = self.basis.iter().chain(&other.basis).cloned().collect();
        basis.sort();
        basis.dedup();
        let k = basis.len();
        let mut data = vec![Complex::new(R::zero(), R::zero()); k * k];
        let position = |l: &Label| basis.binary_search(l).expect("label is in the union");
        for (m, sign) in [(self, R::one()), (other, -R::one())] {
            let at: Vec<usize> = m.basis.iter().map(position).collect();
            let km = at.len();
            for (i, &pi) in at.iter().enumerate() {
                for (j, &pj) in at.iter().enumerate() {
                    data[pi * k + pj] = data[pi * k + pj] + m.data[i * km + j] * sign;
                }
            }
        }
        Ok((basis, data))
    }
}

/// Reduced state on the coordinates in `keep` (in the order given).
pub fn partial_trace<R: Float>(
    state: &QuantumState<R>,
    keep: &[usize],
) -> Result<DensityMatrix<R>, QuantumError> {
    let arity = state.dims.len();
    if let Some(&c) = keep.iter().find(|&&c| c >= arity) {
        return Err(QuantumError::CoordinateOutOfRange {
            coordinate: c,
            arity,
        });
    }
    let traced: Vec<usize> = (0..arity).filter(|c| !keep.contains(c)).collect();
    // environment label -> [(kept label, amplitude)]
    let mut groups: BTreeMap<Label, Vec<(Label, Complex<R>)>> = BTreeMap::new();
    for (label, &amp) in &state.amplitudes {
        let env: Label = traced.iter().map(|&c| label[c]).collect();
        let sys: Label = keep.iter().map(|&c| label[c]).collect();
        groups.entry(env).or_default().push((sys, amp));
    }
    let mut basis: Vec<Label> = groups
        .values()
        .flat_map(|g| g.iter().map(|(l, _)| l.clone()))
        .collect();
    basis.sort();
    basis.dedup();
    let k = basis.len();
    let mut data = vec![Complex::new(R::zero(), R::zero()); k * k];
    for members in groups.values() {
        let indexed: Vec<(usize, Complex<R>)> = members
            .iter()
            .map(|(l, a)| (basis.binary_search(l).expect("label collected above"), *a))
            .collect();
        for &(i, a) in &indexed {
            for &(j, b) in &indexed {
                data[i * k + j] = data[i * k + j] + a * b.conj();
            }
        }
    }
    Ok(DensityMatrix {
        dims: keep.iter().map(|&c| state.dims[c]).collect(),
        basis,
        data,
    })
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity<R: Float>(
    rho: &DensityMatrix<R>,
    psi: &QuantumState<R>,
) -> Result<R, QuantumError> {
    if rho.dims != psi.dims {
        return Err(QuantumError::DimensionMismatch);
    }
    let mut acc = Complex::new(R::zero(), R::zero());
    for (li, ai) in &psi.amplitudes {
        for (lj, aj) in &psi.amplitudes {
            acc = acc + ai.conj() * rho.entry(li, lj) * aj;
        }
    }
    Ok(acc.re)
}

/// `½ Σ |λ_i(ρ₁ − ρ₂)|`, computed from the exact spectrum of the
/// difference. Cost is cubic in the joint support size.
pub fn trace_distance<R: Float>(
    r1: &DensityMatrix<R>,
    r2: &DensityMatrix<R>,
) -> Result<R, QuantumError> {
    let (basis, diff) = r1.difference(r2)?;
    let sum = hermitian_eigenvalues(&diff, basis.len())
        .into_iter()
        .fold(R::zero(), |acc, l| acc + l.abs());
    Ok(sum / real(2.0))
}

/// Cheap upper bound on [`trace_distance`]: `½ √k ‖ρ₁ − ρ₂‖_F` with `k`
/// the joint support size.
pub fn trace_distance_bound<R: Float>(
    r1: &DensityMatrix<R>,
    r2: &DensityMatrix<R>,
) -> Result<R, QuantumError> {
    let (basis, diff) = r1.difference(r2)?;
    let frob = diff
        .iter()
        .fold(R::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt();
    Ok(frob * real::<R>(basis.len() as f64).sqrt() / real(2.0))
}
