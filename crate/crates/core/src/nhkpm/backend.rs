use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{SparseOperator, StateVector};
use crate::scalar::{abs2, czero, Real};
use crate::tn::{mpo_from_terms, Mps, Truncation};
use crate::vectorize::{LiouvillianTerms, VectorizationBasis};

use super::KpmParams;

/// Chebyshev moments at one frequency plus backend diagnostics.
#[derive(Clone, Debug, Default)]
pub struct Moments<T> {
    pub mu: Vec<Complex<T>>,
    /// Largest accumulated truncation error estimate over the recursion (MPS only).
    pub max_truncation: T,
    pub max_bond: usize,
    /// Bond dimensions per recursion step, when recording was requested.
    pub bond_profile: Vec<Vec<usize>>,
}

/// Source of Chebyshev moments μ_m = ⟨L|T_m(ℋ(ω)/a)|R⟩.
pub trait KpmBackend<T: Real>: Sync {
    fn name(&self) -> &'static str;

    fn moments(&self, omega: Complex<T>, kpm: &KpmParams<T>) -> Result<Moments<T>>;

    /// ⟨ψ_L|ψ_R⟩, the total spectral weight.
    fn overlap(&self) -> Complex<T>;

    /// Upper bound on ‖𝓛̃‖₂ used for the default scale.
    fn operator_norm_bound(&self) -> T;

    /// A point c with a bound on ‖𝓛̃ − c‖₂, giving the tighter scale
    /// |ω − c| + ‖𝓛̃ − c‖ when c sits near the middle of the spectrum.
    fn centered_norm_bound(&self) -> (Complex<T>, T) {
        (czero(), self.operator_norm_bound())
    }
}

/// Norm growth beyond this factor over ‖v₀‖ means the scale is too small.
const GROWTH_LIMIT: f64 = 1.5;

fn scale_violation<T: Real>(step: usize, growth: T, kpm: &KpmParams<T>) -> Error {
    Error::ScaleViolation { step, growth: growth.as_f64(), hint: kpm.scale.as_f64() * 1.5 }
}

/// 𝓛̃ restricted to one invariant block, with its adjoint and boundary vectors.
#[derive(Clone, Debug)]
struct Block<T> {
    op: SparseOperator<T>,
    adj: SparseOperator<T>,
    left: Vec<Complex<T>>,
    right: Vec<Complex<T>>,
}

/// Sparse-matrix backend; optionally split into invariant blocks whose moments add.
#[derive(Clone, Debug)]
pub struct DenseBackend<T> {
    blocks: Vec<Block<T>>,
    overlap: Complex<T>,
    norm_bound: T,
    center: Option<(Complex<T>, T)>,
}

impl<T: Real> DenseBackend<T> {
    pub fn new(op: SparseOperator<T>, left: &StateVector<T>, right: &StateVector<T>) -> Result<Self> {
        let all: Vec<usize> = (0..op.dim()).collect();
        Self::with_sectors(op, left, right, &[all])
    }

    /// `sectors` must partition the basis into subspaces invariant under 𝓛̃.
    /// Blocks where either boundary vector vanishes are dropped.
    pub fn with_sectors(
        op: SparseOperator<T>,
        left: &StateVector<T>,
        right: &StateVector<T>,
        sectors: &[Vec<usize>],
    ) -> Result<Self> {
        let d = op.dim();
        if left.dim() != d || right.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "dense backend vectors",
                expected: d,
                found: left.dim().min(right.dim()),
            });
        }
        let covered: usize = sectors.iter().map(|s| s.len()).sum();
        if covered != d {
            return Err(Error::InvalidParameter(format!("sectors cover {covered} of {d} states")));
        }
        let norm_bound = op.max_row_abs_sum().max(op.adjoint().max_row_abs_sum());
        let (la, ra) = (left.amplitudes(), right.amplitudes());
        let overlap = left.dot(right)?;
        let mut blocks = Vec::new();
        for s in sectors {
            let l: Vec<Complex<T>> = s.iter().map(|&i| la[i]).collect();
            let r: Vec<Complex<T>> = s.iter().map(|&i| ra[i]).collect();
            let zero = |v: &[Complex<T>]| v.iter().all(|z| z.re == T::zero() && z.im == T::zero());
            if zero(&l) || zero(&r) {
                continue;
            }
            let sub = if s.len() == d { op.clone() } else { op.restrict(s)? };
            let adj = sub.adjoint();
            blocks.push(Block { op: sub, adj, left: l, right: r });
        }
        Ok(Self { blocks, overlap, norm_bound, center: None })
    }

    /// Builds from the term list and records a bound on ‖𝓛̃ − shift‖, which
    /// gives a tighter scale than the uncentred bound.
    pub fn from_terms(
        lt: &LiouvillianTerms<T>,
        left: &StateVector<T>,
        right: &StateVector<T>,
        sectors: &[Vec<usize>],
    ) -> Result<Self> {
        let op = lt.to_sparse()?;
        let centred = op.add(&SparseOperator::identity(op.dim()).scaled(-lt.shift))?;
        let bound = centred.max_row_abs_sum().max(centred.adjoint().max_row_abs_sum()).min(lt.centered_norm_bound());
        let mut be = Self::with_sectors(op, left, right, sectors)?;
        be.center = Some((lt.shift, bound));
        Ok(be)
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.op.dim()).collect()
    }
}

/// Ket-parity × bra-parity sectors of the doubled chain; 𝓛̃ conserves both
/// because H conserves Π σᶻ and the dissipator is diagonal.
pub fn parity_sectors(n_spins: usize, basis: VectorizationBasis) -> Vec<Vec<usize>> {
    let n2 = 2 * n_spins;
    let (mut ket, mut bra) = (0usize, 0usize);
    for s in 0..n_spins {
        ket |= 1 << (n2 - 1 - basis.ket_site(s, n_spins));
        bra |= 1 << (n2 - 1 - basis.bra_site(s, n_spins));
    }
    let mut out = vec![Vec::new(); 4];
    for b in 0..1usize << n2 {
        let k = ((b & ket).count_ones() % 2) as usize;
        let r = ((b & bra).count_ones() % 2) as usize;
        out[2 * k + r].push(b);
    }
    out
}

#[inline]
fn norm2<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| abs2(*z)).sum()
}

impl<T: Real> KpmBackend<T> for DenseBackend<T> {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn overlap(&self) -> Complex<T> {
        self.overlap
    }

    fn operator_norm_bound(&self) -> T {
        self.norm_bound
    }

    fn centered_norm_bound(&self) -> (Complex<T>, T) {
        self.center.unwrap_or((czero(), self.norm_bound))
    }

    fn moments(&self, omega: Complex<T>, kpm: &KpmParams<T>) -> Result<Moments<T>> {
        let m = kpm.n_moments;
        let mut mu = vec![czero::<T>(); m];
        let inv_a = T::one() / kpm.scale;
        let two_a = inv_a + inv_a;
        let limit = T::lit(GROWTH_LIMIT * GROWTH_LIMIT);
        for b in &self.blocks {
            let d = b.op.dim();
            let v0 = norm2(&b.right);
            // Even steps live in the upper block, odd steps in the lower block.
            let upper_prev = b.right.clone();
            let mut lower_prev = vec![czero::<T>(); d];
            let mut tmp = vec![czero::<T>(); d];
            if m < 2 {
                continue;
            }
            // v₁ = (ℋ/a) v₀ = (0, (ω* − 𝓛̃†) ψ_R / a)
            b.adj.apply_into(&upper_prev, &mut tmp);
            let wc = omega.conj();
            for i in 0..d {
                lower_prev[i] = (wc * upper_prev[i] - tmp[i]).scale(inv_a);
            }
            mu[1] = mu[1] + dot(&b.left, &lower_prev);
            let mut upper = upper_prev;
            let mut lower = lower_prev;
            for k in 2..m {
                if k % 2 == 0 {
                    // u_k = 2(ω − 𝓛̃) d_{k−1}/a − u_{k−2}
                    b.op.apply_into(&lower, &mut tmp);
                    for i in 0..d {
                        upper[i] = (omega * lower[i] - tmp[i]).scale(two_a) - upper[i];
                    }
                } else {
                    b.adj.apply_into(&upper, &mut tmp);
                    for i in 0..d {
                        lower[i] = (wc * upper[i] - tmp[i]).scale(two_a) - lower[i];
                    }
                    mu[k] = mu[k] + dot(&b.left, &lower);
                }
                if k % 8 == 0 {
                    let g = if k % 2 == 0 { norm2(&upper) } else { norm2(&lower) };
                    if g > limit * v0 || !g.is_finite() {
                        return Err(scale_violation(k, (g / v0).sqrt(), kpm));
                    }
                }
            }
        }
        Ok(Moments { mu, max_truncation: T::zero(), max_bond: 0, bond_profile: Vec::new() })
    }
}

#[inline]
fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(czero::<T>(), |s, (x, y)| s + x.conj() * y)
}

/// Block vector (upper, lower) for the hermitrized operator.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector<T> {
    pub upper: StateVector<T>,
    pub lower: StateVector<T>,
}

/// ℋ(ω)·(u, d) = ((ω − 𝓛̃) d, (ω* − 𝓛̃†) u), without forming ℋ.
pub fn hermitrized_apply<T: Real>(
    omega: Complex<T>,
    op: &SparseOperator<T>,
    v: &BlockVector<T>,
) -> Result<BlockVector<T>> {
    let ld = op.matvec(&v.lower)?;
    let adj = op.adjoint();
    let lu = adj.matvec(&v.upper)?;
    let upper = v.lower.scaled(omega).axpy(-Complex::new(T::one(), T::zero()), &ld)?;
    let lower = v.upper.scaled(omega.conj()).axpy(-Complex::new(T::one(), T::zero()), &lu)?;
    Ok(BlockVector { upper, lower })
}

/// Straightforward full-block recursion through [`hermitrized_apply`]. Slow,
/// but computes even moments too; the fast backends are checked against it.
pub fn chebyshev_moments_reference<T: Real>(
    omega: Complex<T>,
    op: &SparseOperator<T>,
    left: &StateVector<T>,
    right: &StateVector<T>,
    kpm: &KpmParams<T>,
) -> Result<Vec<Complex<T>>> {
    let d = op.dim();
    let zero = StateVector::zeros(d);
    let l = BlockVector { upper: zero.clone(), lower: left.clone() };
    let inner = |v: &BlockVector<T>| -> Result<Complex<T>> { Ok(l.upper.dot(&v.upper)? + l.lower.dot(&v.lower)?) };
    let scale = |v: BlockVector<T>, c: T| BlockVector {
        upper: v.upper.scaled(Complex::new(c, T::zero())),
        lower: v.lower.scaled(Complex::new(c, T::zero())),
    };
    let mut prev = BlockVector { upper: right.clone(), lower: zero };
    let mut mu = vec![inner(&prev)?];
    if kpm.n_moments == 1 {
        return Ok(mu);
    }
    let inv_a = T::one() / kpm.scale;
    let mut cur = scale(hermitrized_apply(omega, op, &prev)?, inv_a);
    mu.push(inner(&cur)?);
    let one = Complex::new(T::one(), T::zero());
    for _ in 2..kpm.n_moments {
        let h = scale(hermitrized_apply(omega, op, &cur)?, inv_a + inv_a);
        let next = BlockVector { upper: h.upper.axpy(-one, &prev.upper)?, lower: h.lower.axpy(-one, &prev.lower)? };
        mu.push(inner(&next)?);
        prev = cur;
        cur = next;
    }
    Ok(mu)
}

/// Tensor-network backend: recursion vectors are MPS compressed at every step.
#[derive(Clone, Debug)]
pub struct MpsBackend<T> {
    terms: LiouvillianTerms<T>,
    adjoint: LiouvillianTerms<T>,
    left: Mps<T>,
    right: Mps<T>,
    pub truncation: Truncation<T>,
    pub record_bonds: bool,
    overlap: Complex<T>,
}

impl<T: Real> MpsBackend<T> {
    pub fn new(terms: LiouvillianTerms<T>, left: Mps<T>, right: Mps<T>, truncation: Truncation<T>) -> Result<Self> {
        if terms.max_coupling_range() > crate::tn::MAX_MPO_RANGE {
            return Err(Error::RangeTooLong { range: terms.max_coupling_range(), max: crate::tn::MAX_MPO_RANGE });
        }
        if left.n_sites() != terms.n_sites() || right.n_sites() != terms.n_sites() {
            return Err(Error::DimensionMismatch {
                context: "MPS backend vectors",
                expected: terms.n_sites(),
                found: left.n_sites().min(right.n_sites()),
            });
        }
        let overlap = left.inner(&right)?;
        let adjoint = terms.adjoint();
        Ok(Self { terms, adjoint, left, right, truncation, record_bonds: false, overlap })
    }
}

impl<T: Real> KpmBackend<T> for MpsBackend<T> {
    fn name(&self) -> &'static str {
        "mps"
    }

    fn overlap(&self) -> Complex<T> {
        self.overlap
    }

    fn operator_norm_bound(&self) -> T {
        self.terms.coefficient_norm_sum()
    }

    fn moments(&self, omega: Complex<T>, kpm: &KpmParams<T>) -> Result<Moments<T>> {
        let m = kpm.n_moments;
        let minus = Complex::new(-T::one(), T::zero());
        let fwd = mpo_from_terms(&self.terms.affine(minus, omega))?;
        let bwd = mpo_from_terms(&self.adjoint.affine(minus, omega.conj()))?;
        let tr = &self.truncation;
        let inv_a = T::one() / kpm.scale;
        let two_a = Complex::new(inv_a + inv_a, T::zero());
        let mut out = Moments { mu: vec![czero(); m], ..Default::default() };
        if m < 2 {
            return Ok(out);
        }
        let v0 = self.right.norm();
        let limit = T::lit(GROWTH_LIMIT) * v0;

        let mut err = T::zero();
        let mut upper = self.right.clone();
        let (d1, e1) = self.right.apply_mpo(&bwd, tr)?;
        err = err + e1 * inv_a;
        let mut lower = d1.scaled(Complex::new(inv_a, T::zero()));
        out.mu[1] = self.left.inner(&lower)?;
        let record = |out: &mut Moments<T>, s: &Mps<T>| {
            out.max_bond = out.max_bond.max(s.max_bond());
            if self.record_bonds {
                out.bond_profile.push(s.bond_dims());
            }
        };
        record(&mut out, &lower);
        for k in 2..m {
            let (src, target, mpo) = if k % 2 == 0 { (&lower, &upper, &fwd) } else { (&upper, &lower, &bwd) };
            let applied = src.apply_mpo_exact(mpo, tr.budget)?;
            let (next, e) = Mps::linear_combination(&[(two_a, &applied), (minus, target)], tr)?;
            err = err + e;
            let g = next.norm();
            if g > limit || !g.is_finite() {
                return Err(scale_violation(k, g / v0, kpm));
            }
            record(&mut out, &next);
            if k % 2 == 0 {
                upper = next;
            } else {
                out.mu[k] = self.left.inner(&next)?;
                lower = next;
            }
        }
        out.max_truncation = err;
        Ok(out)
    }
}
