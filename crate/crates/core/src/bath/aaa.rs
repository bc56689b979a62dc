//! AAA (adaptive Antoulas-Anderson) rational fitting of real sample data.

use crate::error::{invalid, Error, Result};
use crate::C64;
use faer::Mat;

/// Froissart-doublet floor relative to `max|f|`.
pub const RESIDUE_FLOOR: f64 = 1e-13;
/// Poles with `|Im p|` below this fraction of the sample span count as
/// sitting on the real axis.
pub const REAL_AXIS_TOL: f64 = 1e-8;

/// Barycentric rational `r(z) = Σ w_j f_j/(z−z_j) / Σ w_j/(z−z_j)` and its
/// pole/residue data.
#[derive(Clone, Debug)]
pub struct PoleSet {
    pub support: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub poles: Vec<C64>,
    pub residues: Vec<C64>,
    /// max |f − r| over the samples
    pub error: f64,
    pub converged: bool,
    /// poles dropped for lying on the real axis
    pub spurious: Vec<C64>,
    /// poles dropped as Froissart doublets
    pub pruned: usize,
}

impl PoleSet {
    pub fn eval(&self, z: C64) -> C64 {
        let mut num = C64::from(0.0);
        let mut den = C64::from(0.0);
        for ((&zj, &fj), &wj) in self.support.iter().zip(&self.values).zip(&self.weights) {
            let d = z - zj;
            if d == C64::from(0.0) {
                return C64::from(fj);
            }
            num += wj * fj / d;
            den += wj / d;
        }
        num / den
    }

    pub fn degree(&self) -> usize {
        self.support.len().saturating_sub(1)
    }
}

fn barycentric(z: f64, support: &[f64], values: &[f64], weights: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&zj, &fj), &wj) in support.iter().zip(values).zip(weights) {
        let d = z - zj;
        if d == 0.0 {
            return fj;
        }
        num += wj * fj / d;
        den += wj / d;
    }
    num / den
}

/// Greedy AAA fit. `tol` is relative to `max|f|`; the loop stops once the
/// sample error falls below it or after `max_degree` (support points minus one).
/// Degree exhaustion still returns the best fit with `converged = false`.
pub fn aaa_fit(samples: &[(f64, f64)], tol: f64, max_degree: usize) -> Result<PoleSet> {
    if samples.len() < 4 {
        return Err(invalid("samples", "need at least 4 samples"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be > 0"));
    }
    let z: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let f: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let n = z.len();
    let fmax = f.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let zmax = z.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mean = f.iter().sum::<f64>() / n as f64;
    let mut r: Vec<f64> = vec![mean; n];
    let mut in_support = vec![false; n];
    let mut sup_idx: Vec<usize> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut error = f64::INFINITY;
    let target = tol * fmax;

    for _ in 0..=max_degree.min(n - 2) {
        let j = (0..n)
            .filter(|&i| !in_support[i])
            .max_by(|&a, &b| (f[a] - r[a]).abs().total_cmp(&(f[b] - r[b]).abs()))
            .expect("unused samples remain");
        in_support[j] = true;
        sup_idx.push(j);
        let rows: Vec<usize> = (0..n).filter(|&i| !in_support[i]).collect();
        let m = sup_idx.len();
        let loewner = Mat::<f64>::from_fn(rows.len(), m, |a, b| {
            let i = rows[a];
            let k = sup_idx[b];
            (f[i] - f[k]) / (z[i] - z[k])
        });
        let svd = loewner
            .svd()
            .map_err(|e| Error::Eigen(format!("aaa svd: {e:?}")))?;
        let v = svd.V();
        let last = m - 1;
        weights = (0..m).map(|k| v[(k, last)]).collect();
        let zs: Vec<f64> = sup_idx.iter().map(|&k| z[k]).collect();
        let fs: Vec<f64> = sup_idx.iter().map(|&k| f[k]).collect();
        error = 0.0;
        for i in 0..n {
            r[i] = if in_support[i] {
                f[i]
            } else {
                barycentric(z[i], &zs, &fs, &weights)
            };
            error = error.max((f[i] - r[i]).abs());
        }
        if error <= target {
            break;
        }
    }

    let support: Vec<f64> = sup_idx.iter().map(|&k| z[k]).collect();
    let values: Vec<f64> = sup_idx.iter().map(|&k| f[k]).collect();
    let converged = error <= target;
    let mut set = PoleSet {
        support,
        values,
        weights,
        poles: Vec::new(),
        residues: Vec::new(),
        error,
        converged,
        spurious: Vec::new(),
        pruned: 0,
    };
    extract_poles(&mut set, fmax, zmax)?;
    Ok(set)
}

/// Poles from the arrowhead pencil `[[0, wᵀ], [1, diag(z)]]`,
/// `diag(0, 1, …, 1)`; residues `N(p)/D′(p)`.
fn extract_poles(set: &mut PoleSet, fmax: f64, zmax: f64) -> Result<()> {
    let m = set.support.len();
    if m < 2 {
        return Ok(());
    }
    let a = Mat::<f64>::from_fn(m + 1, m + 1, |i, j| match (i, j) {
        (0, 0) => 0.0,
        (0, j) => set.weights[j - 1],
        (_, 0) => 1.0,
        (i, j) if i == j => set.support[i - 1],
        _ => 0.0,
    });
    let b = Mat::<f64>::from_fn(m + 1, m + 1, |i, j| if i == j && i > 0 { 1.0 } else { 0.0 });
    let ge = a
        .generalized_eigen(&b)
        .map_err(|e| Error::Eigen(format!("aaa pencil: {e:?}")))?;
    let sa = ge.S_a();
    let sb = ge.S_b();
    let mut raw = Vec::new();
    for k in 0..m + 1 {
        let al = sa[k];
        let be = sb[k];
        if be.norm() <= 1e-12 * al.norm() || be.norm() == 0.0 {
            continue;
        }
        let p = al / be;
        if p.norm() > 1e6 * zmax.max(1.0) {
            continue;
        }
        raw.push(p);
    }
    // conjugate symmetry: keep upper-half poles and mirror them
    let scale = zmax.max(1.0);
    let mut poles = Vec::new();
    for &p in &raw {
        if p.im.abs() <= REAL_AXIS_TOL * scale {
            set.spurious.push(p);
        } else if p.im > 0.0 {
            poles.push(p);
        }
    }
    let upper = poles.clone();
    for p in upper {
        poles.push(p.conj());
    }
    for p in poles {
        let mut num = C64::from(0.0);
        let mut dder = C64::from(0.0);
        for ((&zj, &fj), &wj) in set.support.iter().zip(&set.values).zip(&set.weights) {
            let d = p - zj;
            num += wj * fj / d;
            dder -= wj / (d * d);
        }
        let res = num / dder;
        if res.norm() < RESIDUE_FLOOR * fmax {
            set.pruned += 1;
            continue;
        }
        set.poles.push(p);
        set.residues.push(res);
    }
    Ok(())
}
