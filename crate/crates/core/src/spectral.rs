//! Bi-orthonormal eigenanalysis of generators and the derived relaxation
//! observables.

use crate::error::{Error, Result};
use crate::heom::Generator;
use crate::lattice::SystemOperator;
use crate::sparse::CsrMatrix;
use crate::superop;
use crate::C64;
use faer::linalg::solvers::SolveCore;
use faer::{Conj, Mat};
use serde::{Deserialize, Serialize};

pub const DENSE_LIMIT: usize = 4000;
pub const TOL_MATCH: f64 = 1e-6;
pub const TOL_ZERO: f64 = 1e-9;
pub const EPS_OVERLAP: f64 = 1e-8;
pub const DEFAULT_DOMINANT_K: usize = 20;
/// Smallest singular value of a cluster's unit right modes below which
/// the cluster is treated as defective.
pub const DEFECT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenMode {
    Dense,
    DominantOnly(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeClass {
    SteadyState,
    Dominant,
    CoherentPair,
    Monotonic,
}

impl ModeClass {
    pub fn name(self) -> &'static str {
        match self {
            ModeClass::SteadyState => "steady-state",
            ModeClass::Dominant => "dominant",
            ModeClass::CoherentPair => "coherent-pair",
            ModeClass::Monotonic => "monotonic",
        }
    }
}

/// Right modes have unit norm; left modes satisfy `L_jᴴ R_i = δ_ij`.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<C64>,
    pub right: Mat<C64>,
    pub left: Mat<C64>,
    pub sites: usize,
    pub norm: f64,
    pub complete: bool,
    /// max |L_jᴴ R_i − δ_ij| over the computed pairs
    pub biorthogonality_residual: f64,
    /// largest ‖L_c‖·‖R_c‖ over near-degenerate clusters (1 when none)
    pub cluster_condition: f64,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn right_mode(&self, i: usize) -> Vec<C64> {
        self.right.col(i).iter().copied().collect()
    }

    pub fn left_norm(&self, i: usize) -> f64 {
        self.left.col(i).norm_l2()
    }

    /// System block of the right mode `i`.
    pub fn reduced_mode(&self, i: usize) -> SystemOperator {
        let n = self.sites;
        SystemOperator::from_fn(n, n, |a, b| self.right[(superop::vec_index(n, a, b), i)])
    }
}

fn dense_eig(m: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    let e = m.eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let vals: Vec<C64> = e.S().column_vector().iter().copied().collect();
    Ok((vals, e.U().to_owned()))
}

/// Greedy nearest pairing of `a[i]` with `b[j]` within `tol`.
fn match_values(a: &[C64], b: &[C64], tol: f64) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&x, &y| b[x].re.total_cmp(&b[y].re));
    let sorted_re: Vec<f64> = order.iter().map(|&j| b[j].re).collect();
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &x) in a.iter().enumerate() {
        let lo = sorted_re.partition_point(|&r| r < x.re - tol);
        let hi = sorted_re.partition_point(|&r| r <= x.re + tol);
        for &j in &order[lo..hi] {
            let d = (b[j] - x).norm();
            if d < tol {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut pair = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    for (_, i, j) in cand {
        if pair[i] == usize::MAX && !used[j] {
            pair[i] = j;
            used[j] = true;
        }
    }
    for (i, &p) in pair.iter().enumerate() {
        if p == usize::MAX {
            let best = b.iter().map(|y| (y - a[i]).norm()).fold(f64::INFINITY, f64::min);
            return Err(Error::Unpaired(format!("{}", a[i]), best));
        }
    }
    Ok(pair)
}

/// Single-linkage clusters of eigenvalues closer than `tol`.
fn clusters(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].re.total_cmp(&values[y].re));
    for a in 0..n {
        for b in a + 1..n {
            let (i, j) = (order[a], order[b]);
            if values[j].re - values[i].re > tol {
                break;
            }
            if (values[i] - values[j]).norm() < tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Rescale left modes blockwise so that `L_cᴴ R_c = I` on every cluster.
/// Returns the largest cluster condition estimate.
pub fn biorthonormalize(values: &[C64], right: &mut Mat<C64>, left: &mut Mat<C64>, tol: f64) -> Result<f64> {
    let dim = right.nrows();
    for i in 0..right.ncols() {
        let nr = right.col(i).norm_l2();
        if nr == 0.0 {
            return Err(Error::IllConditioned(format!("zero right mode {i}")));
        }
        for r in 0..dim {
            right[(r, i)] /= nr;
        }
    }
    let mut worst: f64 = 1.0;
    for group in clusters(values, tol) {
        let c = group.len();
        let rc = Mat::<C64>::from_fn(dim, c, |r, k| right[(r, group[k])]);
        let lc = Mat::<C64>::from_fn(dim, c, |r, k| left[(r, group[k])]);
        if c > 1 {
            let sv = rc.singular_values().map_err(|e| Error::Eigen(format!("{e:?}")))?;
            let smin = sv.last().copied().unwrap_or(0.0);
            if smin < DEFECT_TOL {
                return Err(Error::IllConditioned(format!(
                    "defective cluster of {c} modes near {} (condition estimate {:.3e})",
                    values[group[0]],
                    1.0 / smin.max(f64::MIN_POSITIVE)
                )));
            }
        }
        let m = lc.adjoint() * &rc;
        // L ← L M^{-H}, i.e. Lᴴ ← M⁻¹ Lᴴ
        let lu = m.full_piv_lu();
        let mut lt = lc.adjoint().to_owned();
        lu.solve_in_place_with_conj(Conj::No, lt.as_mut());
        let new_l = lt.adjoint().to_owned();
        if new_l.norm_max().is_nan() {
            return Err(Error::IllConditioned(format!(
                "singular overlap in cluster near {}",
                values[group[0]]
            )));
        }
        let cond = new_l.norm_l2() * rc.norm_l2() / c as f64;
        if c > 1 {
            worst = worst.max(cond);
        }
        for (k, &g) in group.iter().enumerate() {
            for r in 0..dim {
                left[(r, g)] = new_l[(r, k)];
            }
        }
    }
    Ok(worst)
}

fn residual(right: &Mat<C64>, left: &Mat<C64>) -> f64 {
    let p = left.adjoint() * right;
    let mut worst: f64 = 0.0;
    for j in 0..p.ncols() {
        for i in 0..p.nrows() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - want).norm());
        }
    }
    worst
}

pub fn eigendecompose(g: &Generator, mode: EigenMode) -> Result<EigenSystem> {
    let norm = g.matrix.norm_inf();
    match mode {
        EigenMode::Dense => dense(g, norm),
        EigenMode::DominantOnly(k) => {
            if g.dim() <= (3 * k).max(60) {
                dense(g, norm)
            } else {
                iterative(g, norm, k)
            }
        }
    }
}

fn dense(g: &Generator, norm: f64) -> Result<EigenSystem> {
    let dim = g.dim();
    if dim > DENSE_LIMIT {
        return Err(Error::Eigen(format!(
            "dense eigensolve limited to dimension {DENSE_LIMIT}, got {dim}"
        )));
    }
    let a = g.matrix.to_dense();
    let (vals, right) = dense_eig(&a)?;
    let (lvals, lvecs) = dense_eig(&a.adjoint().to_owned())?;
    let conj: Vec<C64> = lvals.iter().map(|v| v.conj()).collect();
    let tol = TOL_MATCH * norm.max(f64::MIN_POSITIVE);
    let pair = match_values(&vals, &conj, tol)?;
    let mut left = Mat::<C64>::from_fn(dim, dim, |r, i| lvecs[(r, pair[i])]);
    let mut right = right;
    let cond = biorthonormalize(&vals, &mut right, &mut left, tol)?;
    // one global sweep cleans up cross-cluster leakage: Lᴴ ← (LᴴR)⁻¹Lᴴ
    let p = left.adjoint() * &right;
    let mut lt = left.adjoint().to_owned();
    p.full_piv_lu().solve_in_place_with_conj(Conj::No, lt.as_mut());
    if lt.norm_max().is_finite() {
        left = lt.adjoint().to_owned();
    }
    let res = residual(&right, &left);
    Ok(EigenSystem {
        values: vals,
        right,
        left,
        sites: g.sites,
        norm,
        complete: true,
        biorthogonality_residual: res,
        cluster_condition: cond,
    })
}

/// Shift-invert Arnoldi with explicit restarts. Returns the `k` eigenpairs
/// of `G` (or `Gᴴ`) nearest to `sigma`.
fn shift_invert(
    g: &CsrMatrix,
    sigma: C64,
    k: usize,
    adjoint: bool,
    norm: f64,
) -> Result<(Vec<C64>, Mat<C64>)> {
    let n = g.dim;
    let mut shifted = crate::sparse::Triplets::new(n);
    for (r, c, v) in g.iter() {
        shifted.push(r, c, v);
    }
    for i in 0..n {
        shifted.push(i, i, -sigma);
    }
    let a = shifted.into_csr().to_faer()?;
    let lu = a.sp_lu().map_err(|e| Error::Eigen(format!("sparse lu: {e:?}")))?;
    let apply = |x: &[C64]| -> Vec<C64> {
        let mut m = Mat::<C64>::from_fn(n, 1, |i, _| x[i]);
        if adjoint {
            lu.solve_transpose_in_place_with_conj(Conj::Yes, m.as_mut());
        } else {
            lu.solve_in_place_with_conj(Conj::No, m.as_mut());
        }
        (0..n).map(|i| m[(i, 0)]).collect()
    };
    let op_g = |x: &[C64]| -> Vec<C64> {
        if adjoint {
            g.adjoint_matvec(x)
        } else {
            g.matvec(x)
        }
    };
    let p = (2 * k + 20).max(40).min(n);
    // locked Ritz block kept across thick restarts
    let keep = (k + 10).min(p / 2);
    let start: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.05 * ((i * 104729) % 7) as f64))
        .collect();
    let nrm = start.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<C64>> = vec![start.iter().map(|v| v / nrm).collect()];
    let mut h = Mat::<C64>::zeros(p + 1, p);
    let mut kept = 0;
    let tol = 1e-9 * norm.max(1.0);
    let mut best: Option<(Vec<C64>, Mat<C64>, f64)> = None;
    for _restart in 0..60 {
        let mut steps = p;
        for j in kept..p {
            let mut w = apply(&basis[j]);
            for _pass in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let dot: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                    h[(i, j)] += dot;
                    for (wv, bv) in w.iter_mut().zip(b) {
                        *wv -= dot * bv;
                    }
                }
            }
            let beta = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            h[(j + 1, j)] = C64::from(beta);
            if beta < 1e-14 {
                steps = j + 1;
                break;
            }
            basis.push(w.iter().map(|v| v / beta).collect());
        }
        let hm = Mat::<C64>::from_fn(steps, steps, |i, j| h[(i, j)]);
        let (theta, y) = dense_eig(&hm)?;
        let mut idx: Vec<usize> = (0..steps).collect();
        idx.sort_by(|&a, &b| theta[b].norm().total_cmp(&theta[a].norm()));
        let ritz = |t: usize| -> Vec<C64> {
            let mut x = vec![C64::from(0.0); n];
            for (i, b) in basis.iter().take(steps).enumerate() {
                let yi = y[(i, t)];
                for (xv, bv) in x.iter_mut().zip(b) {
                    *xv += yi * bv;
                }
            }
            let xn = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            x.iter().map(|v| v / xn).collect()
        };
        let want = k.min(steps);
        let mut vals = Vec::with_capacity(want);
        let mut vecs = Mat::<C64>::zeros(n, want);
        let mut worst: f64 = 0.0;
        for (c, &t) in idx.iter().take(want).enumerate() {
            let lam = sigma + theta[t].inv();
            let x = ritz(t);
            let r = op_g(&x)
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - lam * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
            for i in 0..n {
                vecs[(i, c)] = x[i];
            }
            vals.push(lam);
        }
        if best.as_ref().is_none_or(|b| worst < b.2) {
            best = Some((vals, vecs, worst));
        }
        if worst < tol || steps < p {
            break;
        }
        // thick restart: orthonormal basis Q of the leading Ritz vectors in
        // the projected space, then A(VQ) = (VQ)(QᴴHQ) + β v_p+1 (e_pᵀQ)
        let mut q: Vec<Vec<C64>> = Vec::with_capacity(keep);
        for &t in idx.iter().take(keep) {
            let mut col: Vec<C64> = (0..steps).map(|i| y[(i, t)]).collect();
            for _pass in 0..2 {
                for qc in &q {
                    let dot: C64 = qc.iter().zip(&col).map(|(a, b)| a.conj() * b).sum();
                    for (cv, qv) in col.iter_mut().zip(qc) {
                        *cv -= dot * qv;
                    }
                }
            }
            let cn = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if cn > 1e-10 {
                q.push(col.iter().map(|v| v / cn).collect());
            }
        }
        let kk = q.len();
        let qm = Mat::<C64>::from_fn(steps, kk, |i, c| q[c][i]);
        let m = qm.adjoint() * &hm * &qm;
        let beta = h[(steps, steps - 1)];
        let mut fresh: Vec<Vec<C64>> = (0..kk)
            .map(|c| {
                let mut x = vec![C64::from(0.0); n];
                for (i, b) in basis.iter().take(steps).enumerate() {
                    let qi = qm[(i, c)];
                    for (xv, bv) in x.iter_mut().zip(b) {
                        *xv += qi * bv;
                    }
                }
                x
            })
            .collect();
        fresh.push(basis.swap_remove(steps));
        basis = fresh;
        h = Mat::<C64>::zeros(p + 1, p);
        for c in 0..kk {
            for r in 0..kk {
                h[(r, c)] = m[(r, c)];
            }
            h[(kk, c)] = beta * qm[(steps - 1, c)];
        }
        kept = kk;
    }
    let (vals, vecs, worst) = best.expect("at least one Arnoldi cycle");
    if worst > 1e-6 * norm.max(1.0) {
        return Err(Error::Eigen(format!("shift-invert Arnoldi residual {worst:e}")));
    }
    Ok((vals, vecs))
}

fn iterative(g: &Generator, norm: f64, k: usize) -> Result<EigenSystem> {
    let sigma = C64::from(1e-4 * norm.max(1e-12));
    let (vals, right) = shift_invert(&g.matrix, sigma, k, false, norm)?;
    let (lvals, lvecs) = shift_invert(&g.matrix, sigma.conj(), k + 10, true, norm)?;
    let conj: Vec<C64> = lvals.iter().map(|v| v.conj()).collect();
    let tol = TOL_MATCH * norm;
    let pair = match_values(&vals, &conj, tol)?;
    let mut left = Mat::<C64>::from_fn(g.dim(), vals.len(), |r, i| lvecs[(r, pair[i])]);
    let mut right = right;
    let cond = biorthonormalize(&vals, &mut right, &mut left, tol)?;
    let res = residual(&right, &left);
    Ok(EigenSystem {
        values: vals,
        right,
        left,
        sites: g.sites,
        norm,
        complete: false,
        biorthogonality_residual: res,
        cluster_condition: cond,
    })
}

/// `c_i = ‖L_i‖‖R_i‖(L̂_i | ρ_ini)`; with unit right modes this is `L_iᴴ ρ_ini`.
pub fn expansion_coefficients(es: &EigenSystem, initial: &[C64]) -> Result<Vec<C64>> {
    if initial.len() != es.right.nrows() {
        return Err(Error::Dimension {
            expected: es.right.nrows(),
            got: initial.len(),
        });
    }
    let x = Mat::<C64>::from_fn(initial.len(), 1, |i, _| initial[i]);
    let c = es.left.adjoint() * &x;
    Ok((0..es.len()).map(|i| c[(i, 0)]).collect())
}

/// `Σ_i c_i e^{λ_i t} R̂_i`.
pub fn reconstruct(es: &EigenSystem, coeffs: &[C64], t: f64) -> Vec<C64> {
    let w = Mat::<C64>::from_fn(es.len(), 1, |i, _| coeffs[i] * (es.values[i] * t).exp());
    let v = &es.right * &w;
    (0..v.nrows()).map(|i| v[(i, 0)]).collect()
}

pub fn steady_state_index(es: &EigenSystem) -> Result<usize> {
    let tol = TOL_ZERO * es.norm;
    let zeros: Vec<usize> = (0..es.len()).filter(|&i| es.values[i].norm() < tol).collect();
    if zeros.len() != 1 {
        return Err(Error::ZeroModeCount(zeros.len()));
    }
    Ok(zeros[0])
}

/// Steady state normalized to unit system trace.
pub fn steady_state(es: &EigenSystem) -> Result<SystemOperator> {
    let i = steady_state_index(es)?;
    let m = es.reduced_mode(i);
    let tr: C64 = (0..es.sites).map(|k| m[(k, k)]).sum();
    if tr.norm() == 0.0 {
        return Err(Error::IllConditioned("steady state has zero trace".into()));
    }
    Ok(SystemOperator::from_fn(es.sites, es.sites, |a, b| m[(a, b)] / tr))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationTime {
    pub tau: f64,
    /// |c_d| ≤ e⁻¹: the mode is already relaxed at t = 0
    pub already_relaxed: bool,
}

/// `τ = (1 + ln|c_d|)/|Re λ_d|`, clamped at zero.
pub fn relaxation_time(lambda_d: C64, c_d: C64) -> Result<RelaxationTime> {
    if !(lambda_d.re < 0.0) {
        return Err(Error::Domain(format!("Re λ_d must be < 0, got {lambda_d}")));
    }
    if !(c_d.norm() > 0.0) {
        return Err(Error::Domain("c_d must be nonzero".into()));
    }
    let tau = (1.0 + c_d.norm().ln()) / lambda_d.re.abs();
    Ok(if tau <= 0.0 {
        RelaxationTime {
            tau: 0.0,
            already_relaxed: true,
        }
    } else {
        RelaxationTime {
            tau,
            already_relaxed: false,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationFit {
    pub xi: f64,
    pub residual: f64,
    pub sites_used: usize,
}

pub const PROFILE_FLOOR: f64 = 1e-12;

/// Least-squares fit of `ln|ρ_nn| = a − n/ξ` over sites above the floor.
pub fn localization_length(mode: &SystemOperator) -> Result<LocalizationFit> {
    let pts: Vec<(f64, f64)> = (0..mode.nrows())
        .filter_map(|n| {
            let v = mode[(n, n)].norm();
            (v > PROFILE_FLOOR).then(|| ((n + 1) as f64, v.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::Localization(format!(
            "only {} sites above the {PROFILE_FLOOR:e} floor",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let icept = (sy - slope * sx) / m;
    if !(slope < 0.0) {
        return Err(Error::Localization(format!("non-decaying profile, slope {slope}")));
    }
    let residual = (pts.iter().map(|p| (p.1 - icept - slope * p.0).powi(2)).sum::<f64>() / m).sqrt();
    Ok(LocalizationFit {
        xi: -1.0 / slope,
        residual,
        sites_used: pts.len(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeReport {
    pub steady_index: usize,
    pub dominant_index: usize,
    pub lambda_d: C64,
    pub c_d: C64,
    pub tau: RelaxationTime,
    pub xi: Option<LocalizationFit>,
    pub coherent_pair: Option<(C64, C64)>,
    pub classes: Vec<ModeClass>,
    pub coefficients: Vec<C64>,
}

/// Number of slowest modes inspected for coherent pairs.
pub const SLOW_WINDOW: usize = 20;

pub fn classify_modes(es: &EigenSystem, initial: &[C64]) -> Result<ModeReport> {
    let ss = steady_state_index(es)?;
    let coeffs = expansion_coefficients(es, initial)?;
    let tol_imag = TOL_MATCH * es.norm;
    let slowest = |real_only: bool| {
        (0..es.len())
            .filter(|&i| i != ss && coeffs[i].norm() > EPS_OVERLAP)
            .filter(|&i| !real_only || es.values[i].im.abs() <= tol_imag)
            .max_by(|&a, &b| es.values[a].re.total_cmp(&es.values[b].re))
    };
    // coherent pairs are reported separately; fall back to them only
    // when no real mode overlaps the initial state
    let dominant = slowest(true)
        .or_else(|| slowest(false))
        .ok_or(Error::NoDominantMode(EPS_OVERLAP))?;
    let mut slow: Vec<usize> = (0..es.len()).filter(|&i| i != ss).collect();
    slow.sort_by(|&a, &b| es.values[b].re.total_cmp(&es.values[a].re));
    slow.truncate(SLOW_WINDOW);
    let mut classes = vec![ModeClass::Monotonic; es.len()];
    let mut pair = None;
    for &i in &slow {
        let li = es.values[i];
        if li.im.abs() <= tol_imag {
            continue;
        }
        let partner = slow
            .iter()
            .any(|&j| j != i && (es.values[j] - li.conj()).norm() < tol_imag.max(1e-9 * li.norm()));
        if partner {
            classes[i] = ModeClass::CoherentPair;
            if pair.is_none() {
                pair = Some((li, li.conj()));
            }
        }
    }
    // complex modes outside the inspected window are not monotonic either
    for (i, class) in classes.iter_mut().enumerate() {
        if *class == ModeClass::Monotonic && es.values[i].im.abs() > tol_imag && !slow.contains(&i) {
            *class = ModeClass::CoherentPair;
        }
    }
    classes[ss] = ModeClass::SteadyState;
    classes[dominant] = ModeClass::Dominant;
    let lambda_d = es.values[dominant];
    let c_d = coeffs[dominant];
    let tau = relaxation_time(lambda_d, c_d)?;
    let xi = localization_length(&es.reduced_mode(dominant)).ok();
    Ok(ModeReport {
        steady_index: ss,
        dominant_index: dominant,
        lambda_d,
        c_d,
        tau,
        xi,
        coherent_pair: pair,
        classes,
        coefficients: coeffs,
    })
}
