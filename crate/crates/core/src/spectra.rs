//! Sector spectra, leading free energies along the critical curve, level
//! crossings and cusps, and numeric eigenvalue amplitudes.

use crate::algebra::{BigComplex, Scalar, UniPoly, Variable};
use crate::config::{Guards, MAX_AMPLITUDE_WIDTH, MAX_DENSE_DIMENSION};
use crate::error::{Error, Result};
use crate::graphs::{AnnulusSpec, Lattice};
use crate::theory;
use crate::transfer::{exact_partition_series, BlobMode, SectorOperator, Weights};
use crate::zeros::find_roots_from;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

/// Relative modulus tolerance below which two eigenvalues count as tied.
pub const TIE_TOL: f64 = 1e-10;
/// Sectors at most this large are solved densely even when only the
/// leading eigenvalue is wanted.
const SMALL_DENSE: usize = 64;

fn sort_by_modulus(mut ev: Vec<Complex64>) -> Vec<Complex64> {
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let mut i = 0;
    while i < ev.len() {
        let mut j = i + 1;
        while j < ev.len() && (ev[j - 1].norm() - ev[j].norm()).abs() <= TIE_TOL * ev[i].norm() {
            j += 1;
        }
        ev[i..j].sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        i = j;
    }
    ev
}

/// All eigenvalues of a dense matrix, sorted by modulus, descending.
pub fn dense_eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let ev: Vec<Complex64> = if m.iter().all(|z| z.im == 0.0) {
        m.map(|z| z.re).complex_eigenvalues().iter().copied().collect()
    } else {
        let (_, t) = m.clone().schur().unpack();
        (0..n).map(|i| t[(i, i)]).collect()
    };
    sort_by_modulus(ev)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Leading eigenvalue by explicitly restarted Arnoldi.
pub fn leading_arnoldi(op: &SectorOperator, w: &Weights<Complex64>, krylov: usize, tol: f64, max_restarts: usize) -> Result<Complex64> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidSpec("empty sector".into()));
    }
    let m = krylov.clamp(1, n);
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.37 * (0.61 * i as f64).sin(), 0.0))
        .collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|z| *z /= nx);
    for _ in 0..max_restarts {
        let mut basis = vec![x.clone()];
        let mut h = DMatrix::<Complex64>::zeros(m + 1, m);
        let mut k = m;
        let mut beta = 0.0;
        for j in 0..m {
            let mut y = op.apply(w, &basis[j]);
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c = dot(b, &y);
                    h[(i, j)] += c;
                    y.iter_mut().zip(b).for_each(|(yy, bb)| *yy -= c * bb);
                }
            }
            beta = norm(&y);
            h[(j + 1, j)] = Complex64::new(beta, 0.0);
            let scale = h.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if beta <= 1e-14 * scale.max(1e-300) {
                k = j + 1;
                beta = 0.0;
                break;
            }
            if j + 1 < m {
                y.iter_mut().for_each(|z| *z /= beta);
                basis.push(y);
            }
        }
        let hk = h.view((0, 0), (k, k)).into_owned();
        let (q, t) = hk.schur().unpack();
        let idx = (0..k)
            .max_by(|&a, &b| t[(a, a)].norm().total_cmp(&t[(b, b)].norm()))
            .unwrap();
        let theta = t[(idx, idx)];
        // eigenvector of the triangular factor by back substitution
        let mut z = vec![Complex64::zero(); k];
        z[idx] = Complex64::new(1.0, 0.0);
        for i in (0..idx).rev() {
            let s: Complex64 = (i + 1..=idx).map(|j| t[(i, j)] * z[j]).sum();
            let d = t[(i, i)] - theta;
            let d = if d.norm() < 1e-300 { Complex64::new(1e-300, 0.0) } else { d };
            z[i] = -s / d;
        }
        let y: Vec<Complex64> = (0..k).map(|i| (0..k).map(|j| q[(i, j)] * z[j]).sum()).collect();
        let ny = norm(&y);
        let resid = beta * y[k - 1].norm() / ny;
        let mut next = vec![Complex64::zero(); n];
        for (j, b) in basis.iter().enumerate().take(k) {
            let c = y[j] / ny;
            next.iter_mut().zip(b).for_each(|(a, bb)| *a += c * bb);
        }
        if resid <= tol * theta.norm() || theta.norm() == 0.0 {
            return Ok(theta);
        }
        let nn = norm(&next);
        x = next.into_iter().map(|z| z / nn).collect();
    }
    Err(Error::NoConvergence {
        iterations: max_restarts,
    })
}

/// `-(1/W) log |lambda|`.
pub fn free_energy(lambda: Complex64, width: usize) -> f64 {
    -lambda.norm().ln() / width as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorSpectrum {
    pub ell: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub mode: BlobMode,
    pub q: Complex64,
    pub qs: Complex64,
    pub v: Complex64,
    /// Complete when the sector was solved densely; otherwise only the
    /// leading eigenvalue.
    pub eigenvalues: Vec<Complex64>,
    pub complete: bool,
    pub leading: Complex64,
    /// Eigenvalues tied with the leading one in modulus, besides itself.
    pub leading_ties: usize,
    pub free_energy: f64,
}

/// Sector operators for `ell = 0..=W` of one blob mode, built once and
/// evaluated at many weights.
#[derive(Clone, Debug)]
pub struct SectorFamily {
    pub spec: AnnulusSpec,
    pub mode: BlobMode,
    ops: Vec<SectorOperator>,
}

impl SectorFamily {
    pub fn new(spec: &AnnulusSpec, mode: BlobMode, guards: &Guards) -> Result<Self> {
        let ops = (0..=spec.width)
            .map(|ell| SectorOperator::guarded(spec, ell, mode, guards))
            .collect::<Result<Vec<_>>>()?;
        Ok(SectorFamily {
            spec: spec.clone(),
            mode,
            ops,
        })
    }

    /// Flagless sectors `ell = 0..=W`, see [`SectorOperator::flagless`].
    pub fn flagless(spec: &AnnulusSpec, guards: &Guards) -> Result<Self> {
        let ops = (0..=spec.width)
            .map(|ell| SectorOperator::flagless(spec, ell, guards))
            .collect::<Result<Vec<_>>>()?;
        Ok(SectorFamily {
            spec: spec.clone(),
            mode: BlobMode::Blobbed,
            ops,
        })
    }

    pub fn operator(&self, ell: usize) -> &SectorOperator {
        &self.ops[ell]
    }

    pub fn width(&self) -> usize {
        self.spec.width
    }

    /// Leading eigenvalue of a sector, `None` for an empty sector.
    pub fn leading(&self, ell: usize, w: &Weights<Complex64>) -> Result<Option<Complex64>> {
        let op = &self.ops[ell];
        let n = op.dim();
        if n == 0 {
            return Ok(None);
        }
        if n <= SMALL_DENSE {
            return Ok(dense_eigenvalues(&op.dense_complex(w)).first().copied());
        }
        match leading_arnoldi(op, w, 60, 1e-14, 400) {
            Ok(l) => Ok(Some(l)),
            Err(_) if n <= MAX_DENSE_DIMENSION => Ok(dense_eigenvalues(&op.dense_complex(w)).first().copied()),
            Err(e) => Err(e),
        }
    }

    pub fn spectrum(&self, ell: usize, w: &Weights<Complex64>) -> Result<SectorSpectrum> {
        spectrum_of(&self.ops[ell], w)
    }
}

fn spectrum_of(op: &SectorOperator, w: &Weights<Complex64>) -> Result<SectorSpectrum> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidSpec(format!("sector ell = {} is empty in {:?} mode", op.ell, op.mode)));
    }
    let (eigenvalues, complete) = if n <= MAX_DENSE_DIMENSION {
        (dense_eigenvalues(&op.dense_complex(w)), true)
    } else {
        (vec![leading_arnoldi(op, w, 60, 1e-14, 400)?], false)
    };
    let leading = eigenvalues[0];
    let leading_ties = eigenvalues[1..]
        .iter()
        .take_while(|z| (leading.norm() - z.norm()).abs() <= TIE_TOL * leading.norm())
        .count();
    Ok(SectorSpectrum {
        ell: op.ell,
        l: 2 * op.ell,
        mode: op.mode,
        q: w.q,
        qs: w.qs,
        v: w.v,
        eigenvalues,
        complete,
        leading,
        leading_ties,
        free_energy: free_energy(leading, op.width),
    })
}

/// Spectrum of one sector at the given weights.
pub fn sector_spectrum(spec: &AnnulusSpec, ell: usize, mode: BlobMode, w: &Weights<Complex64>) -> Result<SectorSpectrum> {
    spectrum_of(&SectorOperator::new(spec, ell, mode)?, w)
}

/// Weights on the critical curve at `e0 = 1 - 1/t` with `Qs = n n_s(t, r)`.
pub fn curve_weights(lattice: Lattice, t: f64, r: f64) -> Result<Weights<Complex64>> {
    let p = theory::CftParams::new(t, r)?;
    let v = theory::critical_v(lattice, p.e0())?;
    Ok(Weights::new(
        Complex64::new(p.q, 0.0),
        Complex64::new(p.qs, 0.0),
        Complex64::new(v, 0.0),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub qs: f64,
    /// `f_L` for `L = 0, 2, ..., 2W`.
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanTable {
    pub lattice: Lattice,
    pub width: usize,
    pub t: f64,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r");
        for ell in 0..=self.width {
            out.push_str(&format!(",f{}", 2 * ell));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:.12}", row.r));
            for f in &row.f {
                out.push_str(&format!(",{:.15e}", f));
            }
            out.push('\n');
        }
        out
    }

    pub fn column(&self, ell: usize) -> (Vec<f64>, Vec<f64>) {
        self.rows.iter().map(|row| (row.r, row.f[ell])).unzip()
    }
}

/// Leading free energies of all blobbed sectors along the critical curve at
/// fixed `t`. Grid points where `Qs` has a pole are skipped.
pub fn free_energy_scan(lattice: Lattice, width: usize, t: f64, r_grid: &[f64], guards: &Guards) -> Result<ScanTable> {
    let spec = AnnulusSpec::new(lattice, width, 2);
    let fam = SectorFamily::new(&spec, BlobMode::Blobbed, guards)?;
    scan_with(&fam, t, r_grid)
}

pub fn scan_with(fam: &SectorFamily, t: f64, r_grid: &[f64]) -> Result<ScanTable> {
    let rows: Vec<Option<ScanRow>> = r_grid
        .par_iter()
        .map(|&r| -> Result<Option<ScanRow>> {
            let w = match curve_weights(fam.spec.lattice, t, r) {
                Ok(w) => w,
                Err(Error::Pole(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let f = (0..=fam.width())
                .map(|ell| Ok(fam.leading(ell, &w)?.map_or(f64::NAN, |l| free_energy(l, fam.width()))))
                .collect::<Result<Vec<f64>>>()?;
            Ok(Some(ScanRow { r, qs: w.qs.re, f }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable {
        lattice: fam.spec.lattice,
        width: fam.width(),
        t,
        rows: rows.into_iter().flatten().collect(),
    })
}

/// Bisects `f_L - f_{L+2}` along the critical curve to `|dr| <= 1e-10`.
pub fn locate_crossing(fam: &SectorFamily, t: f64, l: usize, bracket: (f64, f64)) -> Result<f64> {
    if l % 2 == 1 || l / 2 + 1 > fam.width() {
        return Err(Error::SectorOutOfRange {
            ell: l / 2 + 1,
            width: fam.width(),
        });
    }
    let ell = l / 2;
    let g = |r: f64| -> f64 {
        let Ok(w) = curve_weights(fam.spec.lattice, t, r) else {
            return f64::NAN;
        };
        match (fam.leading(ell, &w), fam.leading(ell + 1, &w)) {
            (Ok(Some(a)), Ok(Some(b))) => free_energy(a, fam.width()) - free_energy(b, fam.width()),
            _ => f64::NAN,
        }
    };
    theory::bisect(g, bracket.0, bracket.1, 1e-11)
}

/// Non-analytic points of a sampled curve: local maxima of the absolute
/// second difference that stand out from their neighbourhood, refined by
/// intersecting the straight lines on either side.
pub fn cusps(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    const FACTOR: f64 = 10.0;
    let n = xs.len();
    if n < 7 {
        return Vec::new();
    }
    let spread = ys.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(1.0);
    let d2: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                0.0
            } else {
                (ys[i + 1] - 2.0 * ys[i] + ys[i - 1]).abs()
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut last = usize::MAX;
    for i in 2..n - 2 {
        if !d2[i].is_finite() || d2[i] < d2[i - 1] || d2[i] < d2[i + 1] {
            continue;
        }
        if last != usize::MAX && i <= last + 1 {
            continue;
        }
        let mut bg: Vec<f64> = (i.saturating_sub(8)..(i + 9).min(n - 1))
            .filter(|&j| j >= 1 && (j as isize - i as isize).abs() > 2)
            .map(|j| d2[j])
            .filter(|d| d.is_finite())
            .collect();
        if bg.is_empty() {
            continue;
        }
        bg.sort_by(f64::total_cmp);
        let background = bg[bg.len() / 2];
        if d2[i] <= FACTOR * background || d2[i] <= 1e-9 * spread {
            continue;
        }
        let sl = (ys[i - 1] - ys[i - 2]) / (xs[i - 1] - xs[i - 2]);
        let sr = (ys[i + 2] - ys[i + 1]) / (xs[i + 2] - xs[i + 1]);
        let x = if (sl - sr).abs() > 1e-300 {
            (ys[i + 1] - ys[i - 1] + sl * xs[i - 1] - sr * xs[i + 1]) / (sl - sr)
        } else {
            xs[i]
        };
        out.push(x.clamp(xs[i - 1], xs[i + 1]));
        last = i;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorCusps {
    #[serde(rename = "L")]
    pub l: usize,
    pub r: Vec<f64>,
}

/// Per-sector cusp estimates from a scan table.
pub fn locate_cusps(table: &ScanTable) -> Vec<SectorCusps> {
    (0..=table.width)
        .map(|ell| {
            let (xs, ys) = table.column(ell);
            SectorCusps {
                l: 2 * ell,
                r: cusps(&xs, &ys),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BlobDominance {
    pub ell: usize,
    pub blobbed: f64,
    pub unblobbed: Option<f64>,
}

/// Moduli of the leading eigenvalues of the two blocks of each sector.
pub fn blob_dominance(spec: &AnnulusSpec, w: &Weights<Complex64>, guards: &Guards) -> Result<Vec<BlobDominance>> {
    let b = SectorFamily::new(spec, BlobMode::Blobbed, guards)?;
    let u = SectorFamily::new(spec, BlobMode::Unblobbed, guards)?;
    (0..=spec.width)
        .map(|ell| {
            Ok(BlobDominance {
                ell,
                blobbed: b.leading(ell, w)?.map_or(0.0, |z| z.norm()),
                unblobbed: u.leading(ell, w)?.map(|z| z.norm()),
            })
        })
        .collect()
}

/// Characteristic polynomial `det(x I - A)` by Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &[Vec<BigRational>]) -> UniPoly {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::from_i64(1);
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for (l, row) in m.iter().enumerate() {
                    if !a[i][l].is_zero() && !row[j].is_zero() {
                        s += &a[i][l] * &row[j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                if !a[i][l].is_zero() && !m[l][i].is_zero() {
                    tr += &a[i][l] * &m[l][i];
                }
            }
        }
        coeffs[n - k] = -tr / BigRational::from_i64(k as i64);
    }
    UniPoly::new(coeffs, Variable::Q)
}

#[derive(Clone, Debug)]
pub struct AmplitudeOptions {
    pub residual_tol: f64,
    pub start_prec: u32,
    pub max_prec: u32,
    pub held_out: usize,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        AmplitudeOptions {
            residual_tol: 1e-10,
            start_prec: 512,
            max_prec: 4096,
            held_out: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FittedEigenvalue {
    pub lambda: Complex64,
    pub amplitude: Complex64,
    /// Sector blocks `(ell, mode)` whose spectrum contains this eigenvalue.
    pub blocks: Vec<(usize, BlobMode)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorAmplitude {
    pub ell: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub mode: BlobMode,
    pub lambda: Complex64,
    pub amplitude: Complex64,
    /// `D_L(Q, Qs)` for blobbed blocks, `D_L(Q, Q - Qs)` for unblobbed ones.
    pub predicted: f64,
    pub rel_error: f64,
    /// The eigenvalue also occurs in another block, so the fitted amplitude
    /// is a sum.
    pub shared: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplitudeFit {
    pub eigenvalues: Vec<FittedEigenvalue>,
    pub dominant: Vec<SectorAmplitude>,
    /// Largest held-out misfit relative to `|Z(N)| + sum |a_i lambda_i^N|`.
    pub residual: f64,
    pub precision: u32,
    pub lengths: Vec<usize>,
    /// Ratio of extreme pivots in the elimination.
    pub condition: f64,
    pub failed: bool,
}

struct Block {
    ell: usize,
    mode: BlobMode,
    roots: Vec<BigComplex>,
    leading: Option<usize>,
}

fn solve_dense(mut a: Vec<Vec<BigComplex>>, mut b: Vec<BigComplex>) -> Result<(Vec<BigComplex>, f64)> {
    let n = b.len();
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, p);
        b.swap(col, p);
        let piv = a[col][col].clone();
        if piv.is_zero() {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        pivots.push(piv.abs());
        for row in col + 1..n {
            let f = a[row][col].clone() / piv.clone();
            if f.is_zero() {
                continue;
            }
            let (top, rest) = a.split_at_mut(row);
            for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = x.clone() - f.clone() * y.clone();
            }
            b[row] = b[row].clone() - f * b[col].clone();
        }
    }
    let mut x = vec![BigComplex::zero(b[0].prec()); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for k in i + 1..n {
            s = s - a[i][k].clone() * x[k].clone();
        }
        x[i] = s / a[i][i].clone();
    }
    let max = pivots.iter().cloned().fold(Float::new(64), |m, p| if p > m { p } else { m });
    let min = pivots.iter().cloned().reduce(|m, p| if p < m { p } else { m }).unwrap();
    let cond = Float::with_val(64, &max / &min).to_f64();
    Ok((x, cond))
}

/// Fits `Z(N) = sum_i a_i lambda_i^N` over the nonzero eigenvalues of every
/// sector block, with `Z(N)` computed exactly, and compares the amplitude of
/// each block's leading eigenvalue with the closed form.
pub fn extract_amplitudes(
    spec: &AnnulusSpec,
    q: &BigRational,
    qs: &BigRational,
    opts: &AmplitudeOptions,
) -> Result<AmplitudeFit> {
    let width = spec.width;
    if width > MAX_AMPLITUDE_WIDTH {
        return Err(Error::SizeGuard(format!(
            "amplitude extraction limited to W <= {MAX_AMPLITUDE_WIDTH}, got W = {width}"
        )));
    }
    let v = match &spec.coupling {
        crate::graphs::Coupling::Rational(r) => r.clone(),
        _ => return Err(Error::Unsupported("amplitude extraction needs a rational coupling".into())),
    };
    let w = Weights::new(q.clone(), qs.clone(), v);
    let mut mats = Vec::new();
    for ell in 0..=width {
        for mode in [BlobMode::Blobbed, BlobMode::Unblobbed] {
            let op = SectorOperator::new(spec, ell, mode)?;
            if op.dim() > 0 {
                mats.push((ell, mode, characteristic_polynomial(&op.dense(&w))));
            }
        }
    }
    let mut prec = opts.start_prec;
    loop {
        let fit = fit_at(spec, &w, &mats, prec, opts)?;
        if !fit.failed || prec >= opts.max_prec {
            return Ok(fit);
        }
        prec *= 2;
    }
}

fn fit_at(
    spec: &AnnulusSpec,
    w: &Weights<BigRational>,
    mats: &[(usize, BlobMode, UniPoly)],
    prec: u32,
    opts: &AmplitudeOptions,
) -> Result<AmplitudeFit> {
    let root_tol = Float::with_val(64, Float::i_exp(1, -(prec as i32))).to_f64().max(1e-300);
    let mut blocks = Vec::new();
    for (ell, mode, cp) in mats {
        let (core, _) = cp.strip_zero_roots();
        let roots: Vec<BigComplex> = if core.degree().unwrap_or(0) == 0 {
            Vec::new()
        } else {
            find_roots_from(&core, root_tol, prec)?
                .roots
                .into_iter()
                .map(|r| r.z.with_prec(prec))
                .collect()
        };
        let leading = (0..roots.len()).max_by(|&a, &b| roots[a].abs().partial_cmp(&roots[b].abs()).unwrap());
        blocks.push(Block {
            ell: *ell,
            mode: *mode,
            roots,
            leading,
        });
    }
    // merge equal eigenvalues across and within blocks
    let same = Float::with_val(64, Float::i_exp(1, -(prec as i32 / 2))).to_f64();
    let mut distinct: Vec<BigComplex> = Vec::new();
    let mut owners: Vec<Vec<(usize, BlobMode)>> = Vec::new();
    let mut leading_idx = Vec::new();
    for b in &blocks {
        let mut lead = None;
        for (k, z) in b.roots.iter().enumerate() {
            let scale = z.abs_f64().max(1.0);
            let found = distinct
                .iter()
                .position(|d| (d.clone() - z.clone()).abs_f64() <= same * scale);
            let idx = match found {
                Some(i) => i,
                None => {
                    distinct.push(z.clone());
                    owners.push(Vec::new());
                    distinct.len() - 1
                }
            };
            if !owners[idx].contains(&(b.ell, b.mode)) {
                owners[idx].push((b.ell, b.mode));
            }
            if Some(k) == b.leading {
                lead = Some(idx);
            }
        }
        leading_idx.push(lead);
    }
    let k = distinct.len();
    let n_max = k + 1 + opts.held_out;
    let z = exact_partition_series(spec, w, &Guards::unchecked(), n_max)?;
    let zc: Vec<BigComplex> = z.iter().map(|x| BigComplex::from_rational(x, prec)).collect();
    // unknowns b_i = a_i lambda_i^2, rows N = 2..=k+1
    let mut rows = Vec::with_capacity(k);
    let mut pw: Vec<BigComplex> = vec![BigComplex::from_f64(1.0, 0.0, prec); k];
    for _ in 0..k {
        rows.push(pw.clone());
        pw = pw.iter().zip(&distinct).map(|(p, l)| p.clone() * l.clone()).collect();
    }
    let (bsol, condition) = if k == 0 {
        (Vec::new(), 1.0)
    } else {
        solve_dense(rows, zc[..k].to_vec())?
    };
    let amps: Vec<BigComplex> = bsol
        .iter()
        .zip(&distinct)
        .map(|(b, l)| b.clone() / l.clone().pow_u32(2))
        .collect();
    let mut residual: f64 = 0.0;
    for (idx, zn) in zc.iter().enumerate().skip(k) {
        let n = idx + 2;
        let mut s = BigComplex::zero(prec);
        // terms may cancel, e.g. Z(N) = 0 at odd N for a symmetric spectrum
        let mut size = zn.abs();
        for (a, l) in amps.iter().zip(&distinct) {
            let term = a.clone() * l.clone().pow_u32(n as u32);
            size += term.abs();
            s = s + term;
        }
        let diff = (s - zn.clone()).abs();
        let rel = if size.is_zero() { 0.0 } else { Float::with_val(64, &diff / &size).to_f64() };
        residual = residual.max(rel);
    }
    let mut dominant = Vec::new();
    for (b, lead) in blocks.iter().zip(&leading_idx) {
        let Some(i) = *lead else { continue };
        let l = 2 * b.ell;
        let predicted = match b.mode {
            BlobMode::Blobbed => theory::amplitude_d(l as u32, &w.q, &w.qs),
            BlobMode::Unblobbed => theory::amplitude_d_unblobbed(l as u32, &w.q, &w.qs),
        }
        .to_f64()
        .unwrap_or(f64::NAN);
        let amp = amps[i].to_complex64();
        dominant.push(SectorAmplitude {
            ell: b.ell,
            l,
            mode: b.mode,
            lambda: distinct[i].to_complex64(),
            amplitude: amp,
            predicted,
            rel_error: (amp - predicted).norm() / predicted.abs().max(1e-300),
            shared: owners[i].len() > 1,
        });
    }
    let eigenvalues = distinct
        .iter()
        .zip(&amps)
        .zip(&owners)
        .map(|((l, a), o)| FittedEigenvalue {
            lambda: l.to_complex64(),
            amplitude: a.to_complex64(),
            blocks: o.clone(),
        })
        .collect();
    Ok(AmplitudeFit {
        eigenvalues,
        dominant,
        residual,
        precision: prec,
        lengths: (2..=n_max).collect(),
        condition,
        failed: residual.is_nan() || residual > opts.residual_tol,
    })
}
