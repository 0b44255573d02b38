//! Rayleigh fading, signal-alignment null spaces, zero-forcing precoding and
//! the detection-vector selection algorithm.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{path_loss_unchecked, PairPositions};
use crate::linalg::{norm_sqr, CMatrix, Cx};
use crate::scalar::Real;

/// Relative cutoff on the M-th singular value of the stacked alignment matrix.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Largest accepted condition number of the effective channel matrix.
pub const CONDITION_CAP: f64 = 1e8;

/// Squared norm of every combining vector `x_m`.
pub const COMBINER_NORM_SQR: f64 = 2.0;

/// Small-scale fading of one NOMA pair plus the two link distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PairChannel<T> {
    /// `G_m`, N×M, near user.
    pub near: CMatrix<T>,
    /// `G_m'`, N×M, far user.
    pub far: CMatrix<T>,
    pub near_distance: T,
    pub far_distance: T,
}

impl<T: Real> PairChannel<T> {
    pub fn user_antennas(&self) -> usize {
        self.near.rows()
    }

    pub fn bs_antennas(&self) -> usize {
        self.near.cols()
    }

    pub fn near_path_loss(&self, min_distance: T, alpha: T) -> T {
        path_loss_unchecked(self.near_distance, min_distance, alpha)
    }

    pub fn far_path_loss(&self, min_distance: T, alpha: T) -> T {
        path_loss_unchecked(self.far_distance, min_distance, alpha)
    }
}

fn sample_cn<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Cx<T> {
    let scale = T::FRAC_1_SQRT_2();
    Complex::new(
        T::sample_standard_normal(rng) * scale,
        T::sample_standard_normal(rng) * scale,
    )
}

/// N×M matrix of i.i.d. CN(0, 1) entries.
pub fn sample_fading<T: Real, R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(n, m, |_, _| sample_cn(rng))
}

pub fn sample_pair_channel<T: Real, R: Rng + ?Sized>(
    user_antennas: usize,
    bs_antennas: usize,
    positions: &PairPositions<T>,
    rng: &mut R,
) -> PairChannel<T> {
    let near = sample_fading(user_antennas, bs_antennas, rng);
    let far = sample_fading(user_antennas, bs_antennas, rng);
    PairChannel {
        near,
        far,
        near_distance: positions.near_distance(),
        far_distance: positions.far_distance(),
    }
}

/// `[G_mᴴ, −G_m'ᴴ]`, the M×2N alignment constraint matrix.
pub fn alignment_matrix<T: Real>(near: &CMatrix<T>, far: &CMatrix<T>) -> Result<CMatrix<T>> {
    let neg = Complex::new(-T::one(), T::zero());
    near.adjoint().hstack(&far.adjoint().scale(neg))
}

/// Orthonormal basis (2N×(2N−M)) of the kernel of `[G_mᴴ, −G_m'ᴴ]`.
pub fn alignment_nullspace<T: Real>(near: &CMatrix<T>, far: &CMatrix<T>) -> Result<CMatrix<T>> {
    let (n, m) = near.shape();
    if far.shape() != (n, m) {
        return Err(Error::Dimension {
            op: "alignment_nullspace",
            expected: n * m,
            found: far.rows() * far.cols(),
        });
    }
    if 2 * n <= m {
        return Err(Error::Config(format!(
            "signal alignment needs N > M/2 (N = {n}, M = {m})"
        )));
    }
    let stacked = alignment_matrix(near, far)?;
    let svd = stacked.svd();
    let largest = svd.singular_values[0];
    let cutoff = largest * T::c(RANK_CUTOFF);
    let rank = svd
        .singular_values
        .iter()
        .take(m)
        .filter(|&&s| s >= cutoff && s > T::zero())
        .count();
    if rank < m {
        return Err(Error::NumericalRank {
            expected: 2 * n - m,
            found: 2 * n - rank,
        });
    }
    Ok(svd.right.columns(m, 2 * n))
}

/// Splits `U_m x_m` into the near- and far-user detection vectors.
pub fn detection_vectors<T: Real>(
    nullspace: &CMatrix<T>,
    combiner: &[Cx<T>],
) -> Result<(Vec<Cx<T>>, Vec<Cx<T>>)> {
    if combiner.len() != nullspace.cols() {
        return Err(Error::Dimension {
            op: "detection_vectors",
            expected: nullspace.cols(),
            found: combiner.len(),
        });
    }
    let norm = norm_sqr(combiner);
    let target = T::c(COMBINER_NORM_SQR);
    if (norm - target).abs() > T::c(1e-6) * target {
        return Err(Error::domain(
            "detection_vectors",
            format!("combiner squared norm {norm}, expected 2"),
        ));
    }
    let stacked = nullspace.mul_vec(combiner)?;
    let n = stacked.len() / 2;
    let far = stacked[n..].to_vec();
    let mut near = stacked;
    near.truncate(n);
    Ok((near, far))
}

/// Random combiner, uniform on the complex sphere of squared radius 2.
pub fn random_combiner<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Cx<T>> {
    loop {
        let v: Vec<Cx<T>> = (0..dim).map(|_| sample_cn(rng)).collect();
        let norm = norm_sqr(&v);
        if norm > T::zero() {
            let s = (T::c(COMBINER_NORM_SQR) / norm).sqrt();
            return v.into_iter().map(|z| z * s).collect();
        }
    }
}

/// `√2 · e_i`, the candidate combiner used by the selection algorithm.
pub fn basis_combiner<T: Real>(dim: usize, index: usize) -> Vec<Cx<T>> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
    v[index] = Complex::new(T::c(COMBINER_NORM_SQR).sqrt(), T::zero());
    v
}

/// Aligned detection vectors of one pair and their shared effective channel.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedLink<T> {
    pub nullspace: CMatrix<T>,
    pub combiner: Vec<Cx<T>>,
    pub near_vector: Vec<Cx<T>>,
    pub far_vector: Vec<Cx<T>>,
    /// `g_m = G_mᴴ v_m` (equal to `G_m'ᴴ v_m'`).
    pub effective: Vec<Cx<T>>,
}

impl<T: Real> AlignedLink<T> {
    pub fn from_nullspace(
        channel: &PairChannel<T>,
        nullspace: CMatrix<T>,
        combiner: Vec<Cx<T>>,
    ) -> Result<Self> {
        let (near_vector, far_vector) = detection_vectors(&nullspace, &combiner)?;
        let effective = channel.near.adjoint_mul_vec(&near_vector)?;
        Ok(Self {
            nullspace,
            combiner,
            near_vector,
            far_vector,
            effective,
        })
    }

    /// `‖G_mᴴ v_m − G_m'ᴴ v_m'‖`.
    pub fn alignment_residual(&self, channel: &PairChannel<T>) -> Result<T> {
        let a = channel.near.adjoint_mul_vec(&self.near_vector)?;
        let b = channel.far.adjoint_mul_vec(&self.far_vector)?;
        Ok(a.iter()
            .zip(&b)
            .fold(T::zero(), |acc, (x, y)| acc + (x - y).norm_sqr())
            .sqrt())
    }
}

/// Aligns one pair with the given combiner.
pub fn align_pair<T: Real>(
    channel: &PairChannel<T>,
    combiner: Vec<Cx<T>>,
) -> Result<AlignedLink<T>> {
    let u = alignment_nullspace(&channel.near, &channel.far)?;
    AlignedLink::from_nullspace(channel, u, combiner)
}

/// Zero-forcing precoder `P = G⁻ᴴ D` with per-column power normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet<T> {
    /// Rows are `g_mᴴ`.
    pub effective_channel: CMatrix<T>,
    pub precoder: CMatrix<T>,
    /// Diagonal of `D`.
    pub scaling: Vec<T>,
    /// `1 / (G⁻¹G⁻ᴴ)_{m,m}`.
    pub effective_gains: Vec<T>,
}

impl<T: Real> PrecoderSet<T> {
    pub fn column(&self, m: usize) -> Vec<Cx<T>> {
        self.precoder.column(m)
    }
}

/// Builds the zero-forcing precoder for an effective channel whose rows are `g_mᴴ`.
pub fn build_precoder<T: Real>(effective_channel: &CMatrix<T>) -> Result<PrecoderSet<T>> {
    let (rows, cols) = effective_channel.shape();
    if rows != cols {
        return Err(Error::Dimension {
            op: "build_precoder",
            expected: rows,
            found: cols,
        });
    }
    let condition = effective_channel.condition_number();
    if !(condition <= T::c(CONDITION_CAP)) {
        return Err(Error::IllConditioned {
            condition: condition.as_f64(),
        });
    }
    let inv = effective_channel.inverse()?;
    let effective_gains: Vec<T> = (0..rows)
        .map(|m| T::one() / norm_sqr(&inv.column(m)))
        .collect();
    let scaling: Vec<T> = effective_gains.iter().map(|g| g.sqrt()).collect();
    // rows of the input are g_mᴴ, so its inverse equals G⁻ᴴ
    let precoder = CMatrix::from_fn(rows, rows, |i, m| inv[(i, m)] * scaling[m]);
    Ok(PrecoderSet {
        effective_channel: effective_channel.clone(),
        precoder,
        scaling,
        effective_gains,
    })
}

pub fn build_precoder_from_links<T: Real>(links: &[AlignedLink<T>]) -> Result<PrecoderSet<T>> {
    let rows: Vec<Vec<Cx<T>>> = links.iter().map(|l| l.effective.clone()).collect();
    build_precoder(&CMatrix::from_adjoint_rows(&rows)?)
}

/// Result of the max-min detection-vector selection.
#[derive(Debug, Clone)]
pub struct Selection<T> {
    /// Zero-based index `i*` of the chosen basis combiner.
    pub index: usize,
    pub links: Vec<AlignedLink<T>>,
    pub precoder: PrecoderSet<T>,
    /// `γ_min,i` for every candidate `i`.
    pub min_gains: Vec<T>,
}

/// For each basis combiner `√2 e_i`, builds the effective channel of all pairs and
/// keeps the candidate whose weakest pair gain is largest.
pub fn select_detection_vectors<T: Real>(channels: &[PairChannel<T>]) -> Result<Selection<T>> {
    let first = channels
        .first()
        .ok_or_else(|| Error::Config("no user pairs".into()))?;
    let (n, m) = first.near.shape();
    if channels.len() != m {
        return Err(Error::Dimension {
            op: "select_detection_vectors",
            expected: m,
            found: channels.len(),
        });
    }
    if 2 * n <= m {
        return Err(Error::Config(format!(
            "signal alignment needs N > M/2 (N = {n}, M = {m})"
        )));
    }
    let nullspaces = channels
        .iter()
        .map(|c| alignment_nullspace(&c.near, &c.far))
        .collect::<Result<Vec<_>>>()?;
    let candidates = 2 * n - m;
    let mut best: Option<(usize, Vec<AlignedLink<T>>, PrecoderSet<T>)> = None;
    let mut min_gains = Vec::with_capacity(candidates);
    for i in 0..candidates {
        let links = channels
            .iter()
            .zip(&nullspaces)
            .map(|(c, u)| AlignedLink::from_nullspace(c, u.clone(), basis_combiner(candidates, i)))
            .collect::<Result<Vec<_>>>()?;
        let precoder = build_precoder_from_links(&links)?;
        let gmin = precoder
            .effective_gains
            .iter()
            .copied()
            .fold(T::infinity(), T::min);
        let better = match &best {
            None => true,
            Some((j, _, _)) => gmin > min_gains[*j],
        };
        min_gains.push(gmin);
        if better {
            best = Some((i, links, precoder));
        }
    }
    let (index, links, precoder) = best.expect("at least one candidate");
    Ok(Selection {
        index,
        links,
        precoder,
        min_gains,
    })
}
