//! Error constants for linear complementarity problems with B1 matrices:
//! the analytic bound on `max_{d in [0,1]^n} ||(I - D + DM)^{-1}||_inf`
//! and a sampling experiment that checks it.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::{BoundCertificate, FormulaId, Param};
use crate::classify::{b1_split, is_b1, is_s_sdd1, is_sdd1, is_sdd1_with};
use crate::error::{Error, Result};
use crate::generate::{sample_stream, uniform01, GENERATOR};
use crate::io::matrix_digest;
use crate::matrix::{partition, row_sum_unchecked, DenseMatrix};
use crate::oracle::inverse_inf_norm;

/// Largest order for which every corner of `[0,1]^n` is evaluated.
pub const CORNER_PROBE_MAX_ORDER: usize = 12;

/// A sampled norm above `bound + VIOLATION_TOL` counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Analytic bound for a B1 matrix. When every `r_i` of the split is zero
/// the `n - 1` coefficient is dropped.
pub fn lcp_b1_bound(m: &DenseMatrix) -> Result<BoundCertificate> {
    if !is_b1(m) {
        return Err(Error::Hypothesis(
            "M is not a B1 matrix: its shifted part is not SDD1 with positive diagonal".into(),
        ));
    }
    let split = b1_split(m);
    let a = &split.a;
    let n = a.order();
    let p = partition(a);
    let r_n1 = |i: usize| row_sum_unchecked(a, i, p.n1.as_slice());
    let r_n2 = |i: usize| row_sum_unchecked(a, i, p.n2.as_slice());
    let d = |i: usize| a.get(i, i);

    let factor = 1.0
        + p.n2
            .iter()
            .map(|i| p.p_values[i] / d(i))
            .fold(f64::NEG_INFINITY, f64::max);

    let phi = if p.n2.len() == 1 {
        (1.0 / d(p.n2.as_slice()[0])).max(1.0)
    } else {
        let mut best = f64::NEG_INFINITY;
        for i in p.n2.iter() {
            for j in p.n2.iter().filter(|&j| j != i) {
                let den = 1f64
                    .min(d(i))
                    .min(d(j))
                    .min(d(i) * d(j) - r_n2(i) * r_n2(j));
                if den <= 0.0 {
                    return Err(Error::Hypothesis(format!(
                        "pair ({}, {}) has nonpositive denominator",
                        i + 1,
                        j + 1
                    )));
                }
                best = best.max((d(j).max(1.0) + r_n2(i)) / den);
            }
        }
        best
    };

    let mut psi = None;
    for i in p.n1.iter() {
        let coupling: f64 = p
            .n2
            .iter()
            .map(|j| a.get(i, j).abs() / d(j) * p.p_values[j])
            .sum();
        let den = (d(i) - r_n1(i) - coupling).min(1.0);
        if den <= 0.0 {
            return Err(Error::Hypothesis(format!(
                "row {} has nonpositive psi denominator",
                i + 1
            )));
        }
        let v = (1.0 + phi * r_n2(i)) / den;
        psi = Some(psi.map_or(v, |m: f64| m.max(v)));
    }

    let base = factor * psi.map_or(phi, |psi| phi.max(psi));
    let coefficient = if split.c_is_zero() { 1.0 } else { (n - 1) as f64 };
    let mut c = BoundCertificate::new(FormulaId::LcpB1, coefficient * base)
        .with_param("phi_tilde", Param::Real(phi))
        .with_param("factor", Param::Real(factor))
        .with_param("coefficient", Param::Real(coefficient))
        .with_param("uncoefficiented", Param::Real(base));
    match psi {
        Some(psi) => c = c.with_param("psi_tilde", Param::Real(psi)),
        None => c = c.with_param("psi_empty", Param::Flag(true)),
    }
    if p.n2.len() == 1 {
        c = c.with_param("single_dominant_row", Param::Flag(true));
    }
    Ok(c)
}

/// `I - D + D M` for `D = diag(d)`.
pub fn lcp_matrix(m: &DenseMatrix, d: &[f64]) -> DenseMatrix {
    let n = m.order();
    DenseMatrix::from_fn(n, |i, j| {
        let v = d[i] * m.get(i, j);
        if i == j {
            1.0 - d[i] + v
        } else {
            v
        }
    })
    .expect("finite entries")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    /// `d` uniform on `[0,1)^n`.
    Uniform,
    /// `d = 0` for every sample, independent of the seed.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub samples: usize,
    pub seed: u64,
    pub mode: SampleMode,
    /// Evaluate all `2^n` corners when `n` is at most this order.
    pub corner_limit: usize,
}

impl ExperimentConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            mode: SampleMode::Uniform,
            corner_limit: CORNER_PROBE_MAX_ORDER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcpSample {
    pub index: usize,
    pub d: Vec<f64>,
    /// `None` when `I - D + DM` was numerically singular.
    pub norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerProbe {
    pub corners: usize,
    pub max_norm: f64,
    pub violations: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcpExperiment {
    pub generator: String,
    pub matrix_sha256: String,
    pub seed: u64,
    pub sample_count: usize,
    pub analytic_bound: f64,
    pub samples: Vec<LcpSample>,
    pub violations: usize,
    pub failures: usize,
    pub corners: Option<CornerProbe>,
}

impl LcpExperiment {
    pub fn max_norm(&self) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| s.norm)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn run_experiment(m: &DenseMatrix, samples: usize, seed: u64) -> Result<LcpExperiment> {
    run_experiment_with(m, ExperimentConfig::new(samples, seed))
}

pub fn run_experiment_with(m: &DenseMatrix, config: ExperimentConfig) -> Result<LcpExperiment> {
    if config.samples == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let bound = lcp_b1_bound(m)?.value;
    let n = m.order();
    let samples: Vec<LcpSample> = (0..config.samples)
        .into_par_iter()
        .map(|index| {
            let d: Vec<f64> = match config.mode {
                SampleMode::Uniform => {
                    let mut rng = sample_stream(config.seed, index as u64);
                    (0..n).map(|_| uniform01(&mut rng)).collect()
                }
                SampleMode::Zero => vec![0.0; n],
            };
            let norm = inverse_inf_norm(&lcp_matrix(m, &d)).ok();
            LcpSample { index, d, norm }
        })
        .collect();
    let violations = samples
        .iter()
        .filter(|s| s.norm.is_some_and(|v| v > bound + VIOLATION_TOL))
        .count();
    let failures = samples.iter().filter(|s| s.norm.is_none()).count();
    let corners = (n <= config.corner_limit).then(|| probe_corners(m, bound));
    Ok(LcpExperiment {
        generator: GENERATOR.to_string(),
        matrix_sha256: matrix_digest(m),
        seed: config.seed,
        sample_count: config.samples,
        analytic_bound: bound,
        samples,
        violations,
        failures,
        corners,
    })
}

/// Exact norms at every `d in {0,1}^n`.
pub fn probe_corners(m: &DenseMatrix, bound: f64) -> CornerProbe {
    let n = m.order();
    let count = 1usize << n;
    let norms: Vec<Option<f64>> = (0..count)
        .into_par_iter()
        .map(|mask| {
            let d: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
            inverse_inf_norm(&lcp_matrix(m, &d)).ok()
        })
        .collect();
    CornerProbe {
        corners: count,
        max_norm: norms.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max),
        violations: norms
            .iter()
            .flatten()
            .filter(|&&v| v > bound + VIOLATION_TOL)
            .count(),
        failures: norms.iter().filter(|v| v.is_none()).count(),
    }
}

/// Writes the header line and one tab-separated line per sample:
/// index, space-separated `d` entries, norm (`singular` on failure).
pub fn write_records(exp: &LcpExperiment, mut out: impl Write) -> Result<()> {
    writeln!(
        out,
        "# lcp-experiment generator={} matrix_sha256={} seed={} bound={:e} samples={} violations={}",
        exp.generator, exp.matrix_sha256, exp.seed, exp.analytic_bound, exp.sample_count, exp.violations
    )?;
    for s in &exp.samples {
        let d: Vec<String> = s.d.iter().map(|v| format!("{v:e}")).collect();
        match s.norm {
            Some(v) => writeln!(out, "{}\t{}\t{v:e}", s.index, d.join(" "))?,
            None => writeln!(out, "{}\t{}\tsingular", s.index, d.join(" "))?,
        }
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, field: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| parse_err(line, format!("bad value for {field}: {v:?}")))
}

/// Reads records written by [`write_records`]. The corner probe is not
/// part of the format.
pub fn read_records(input: impl BufRead) -> Result<LcpExperiment> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(parse_err(1, "empty record file")),
    };
    let body = header
        .strip_prefix("# lcp-experiment ")
        .ok_or_else(|| parse_err(1, "missing experiment header"))?;
    let field = |name: &str| -> Result<String> {
        body.split_whitespace()
            .find_map(|kv| kv.strip_prefix(name).and_then(|r| r.strip_prefix('=')))
            .map(str::to_string)
            .ok_or_else(|| parse_err(1, format!("header lacks {name}")))
    };
    let generator = field("generator")?;
    let matrix_sha256 = field("matrix_sha256")?;
    let seed = parse_num(1, "seed", &field("seed")?)?;
    let analytic_bound = parse_num(1, "bound", &field("bound")?)?;
    let sample_count = parse_num(1, "samples", &field("samples")?)?;
    let violations = parse_num(1, "violations", &field("violations")?)?;

    let mut samples = Vec::new();
    for (k, line) in lines {
        let line = line?;
        let no = k + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(parse_err(no, "expected three tab-separated fields"));
        }
        let index = parse_num(no, "index", parts[0])?;
        let d = parts[1]
            .split_whitespace()
            .map(|v| parse_num(no, "d", v))
            .collect::<Result<Vec<f64>>>()?;
        let norm = match parts[2] {
            "singular" => None,
            v => Some(parse_num(no, "norm", v)?),
        };
        samples.push(LcpSample { index, d, norm });
    }
    if samples.len() != sample_count {
        return Err(parse_err(
            samples.len() + 1,
            format!("header announces {sample_count} samples, found {}", samples.len()),
        ));
    }
    let failures = samples.iter().filter(|s| s.norm.is_none()).count();
    Ok(LcpExperiment {
        generator,
        matrix_sha256,
        seed,
        sample_count,
        analytic_bound,
        samples,
        violations,
        failures,
        corners: None,
    })
}

/// Checks that `B = I - D + DA` is SDD1 with positive diagonal, that its
/// partition nests inside that of `A` and that it is `N2(A)`-SDD1.
pub fn scaled_matrix_sdd1_check(a: &DenseMatrix, d: &[f64]) -> Result<bool> {
    let n = a.order();
    let pa = partition(a);
    if !is_sdd1_with(a, &pa) || a.diagonal().iter().any(|&v| v <= 0.0) {
        return Err(Error::Hypothesis(
            "A must be SDD1 with a positive diagonal".into(),
        ));
    }
    if d.len() != n {
        return Err(Error::InvalidParameter(format!(
            "d has {} entries, expected {n}",
            d.len()
        )));
    }
    if let Some(i) = d.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidParameter(format!(
            "d_{} = {} lies outside [0, 1]",
            i + 1,
            d[i]
        )));
    }
    let b = lcp_matrix(a, d);
    let pb = partition(&b);
    Ok(is_sdd1(&b)
        && b.diagonal().iter().all(|&v| v > 0.0)
        && pb.n1.is_subset(&pa.n1)
        && pa.n2.is_subset(&pb.n2)
        && is_s_sdd1(&b, &pa.n2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    #[test]
    fn bound_on_printed_b1_matrix() {
        let m = testdata::lcp_8x8();
        let c = lcp_b1_bound(&m).unwrap();
        assert!((c.value - 4.1952).abs() < 5e-4);
        assert_eq!(c.real("coefficient"), Some(1.0));
        assert!((c.real("phi_tilde").unwrap() - 1.36).abs() < 1e-12);
        assert!((c.real("psi_tilde").unwrap() - 3.312).abs() < 1e-12);
    }

    #[test]
    fn identity_bound_is_one() {
        let c = lcp_b1_bound(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(c.params.get("psi_empty"), Some(&Param::Flag(true)));
    }

    #[test]
    fn shifted_rows_keep_the_coefficient() {
        let m = DenseMatrix::from_rows(&[[3.0, 1.0, 1.0], [1.0, 3.0, 1.0], [0.0, -1.0, 2.0]]).unwrap();
        let c = lcp_b1_bound(&m).unwrap();
        assert_eq!(c.real("coefficient"), Some(2.0));
        assert_eq!(c.value, 2.0 * c.real("uncoefficiented").unwrap());
    }

    #[test]
    fn non_b1_is_rejected() {
        let m = DenseMatrix::identity(3).map(|v| -v).unwrap();
        assert!(matches!(lcp_b1_bound(&m), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn zero_mode_gives_identity_norm() {
        let m = testdata::lcp_8x8();
        let cfg = ExperimentConfig {
            mode: SampleMode::Zero,
            corner_limit: 0,
            ..ExperimentConfig::new(1, 0)
        };
        let e = run_experiment_with(&m, cfg).unwrap();
        assert_eq!(e.samples[0].norm, Some(1.0));
        assert!(e.corners.is_none());
    }

    #[test]
    fn experiment_is_deterministic_and_sound() {
        let m = testdata::lcp_8x8();
        let a = run_experiment(&m, 200, 17).unwrap();
        let b = run_experiment(&m, 200, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violations, 0);
        assert_eq!(a.failures, 0);
        let corners = a.corners.as_ref().unwrap();
        assert_eq!(corners.corners, 256);
        assert_eq!(corners.violations, 0);
        assert!(a.samples.iter().all(|s| s.d.iter().all(|&v| (0.0..=1.0).contains(&v))));
        assert!(matches!(run_experiment(&m, 0, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn records_round_trip() {
        let m = testdata::lcp_8x8();
        let e = run_experiment(&m, 25, 3).unwrap();
        let mut buf = Vec::new();
        write_records(&e, &mut buf).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        assert_eq!(back.samples, e.samples);
        assert_eq!(back.analytic_bound, e.analytic_bound);
        assert_eq!(back.seed, 3);
        assert_eq!(back.matrix_sha256, e.matrix_sha256);
        assert!(matches!(read_records(&b"nope\n"[..]), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn scaled_matrix_examples() {
        let a = testdata::lcp_8x8();
        assert!(scaled_matrix_sdd1_check(&a, &[1.0; 8]).unwrap());
        assert!(scaled_matrix_sdd1_check(&a, &[0.0; 8]).unwrap());
        assert!(scaled_matrix_sdd1_check(&a, &[0.3, 0.9, 0.1, 0.5, 0.7, 0.2, 1.0, 0.0]).unwrap());
        assert!(matches!(
            scaled_matrix_sdd1_check(&a, &[1.5; 8]),
            Err(Error::InvalidParameter(_))
        ));
        let neg = DenseMatrix::identity(2).map(|v| -v).unwrap();
        assert!(matches!(
            scaled_matrix_sdd1_check(&neg, &[0.5; 2]),
            Err(Error::Hypothesis(_))
        ));
    }
}
