use std::collections::BTreeSet;

use anyhow::{bail, Result};
use subtag::codes::{CoalitionSpec, LinearCode};
use subtag::ec::{AgCodeSpec, Classification, EcPoint, EllipticCurve};
use subtag::field::FieldElement;
use subtag::linalg::Matrix;
use subtag::params::{canonical_field, ec_spec};

use crate::reports::{AnalyzeReport, EcClass, EcCodeReport, EcRow, EcTable, TargetAnalysis};
use crate::{check_verifier, load_params, parse_points, AnalyzeArgs, EcCodeArgs};

fn values(word: &[FieldElement]) -> Vec<u32> {
    word.iter().map(|e| e.value()).collect()
}

fn rows(m: &Matrix) -> Vec<Vec<u32>> {
    m.row_vecs().iter().map(|r| values(r)).collect()
}

fn point(p: &EcPoint) -> Option<[u32; 2]> {
    match *p {
        EcPoint::Affine { x, y } => Some([x.value(), y.value()]),
        EcPoint::Infinity => None,
    }
}

fn masks(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    (0u64..1 << n).map(move |m| (0..n).filter(|j| m >> j & 1 == 1).collect())
}

/// Access structures are all k-subsets of the other positions.
fn threshold(code: &LinearCode, per_target: &[(usize, Vec<BTreeSet<usize>>)]) -> Option<usize> {
    let k = code.dimension();
    let n = code.length();
    if per_target.len() != n {
        return None;
    }
    per_target
        .iter()
        .all(|(i, sets)| {
            let expected: BTreeSet<BTreeSet<usize>> = masks(n).filter(|s| s.len() == k && !s.contains(i)).collect();
            sets.iter().cloned().collect::<BTreeSet<_>>() == expected
        })
        .then_some(k)
}

/// The classification of every coalition of size n-k-1 and n-k against
/// every other position, next to the span test on the residue code.
pub(crate) fn ec_table(spec: &AgCodeSpec) -> Result<EcTable> {
    let n = spec.len();
    let k = spec.degree();
    let code = spec.residue_code()?;
    let curve = spec.curve();
    let mut rows = Vec::new();
    for a in masks(n).filter(|a| a.len() + 1 == n - k || a.len() == n - k) {
        let rest: Vec<EcPoint> = (0..n).filter(|j| !a.contains(j)).map(|j| spec.points()[j]).collect();
        let rest_sums_to_zero = curve.sum(&rest) == EcPoint::Infinity;
        for target in (0..n).filter(|t| !a.contains(t)) {
            let cls = spec.classify_coalition(&a, target)?;
            let oracle = code.forgeable(&CoalitionSpec::new(n, a.iter().copied(), target)?).forgeable;
            let (class, pt) = match cls {
                Classification::NotForgeable => (EcClass::NotForgeable, None),
                Classification::ForgeableAgainstExactly(p) => (EcClass::ForgeableAgainstExactly, point(&p)),
                Classification::ForgeableAgainstAll => (EcClass::ForgeableAgainstAll, None),
            };
            rows.push(EcRow {
                coalition: a.iter().map(|j| j + 1).collect(),
                target: target + 1,
                agrees: oracle == (class != EcClass::NotForgeable),
                class,
                point: pt,
                rest_sums_to_zero,
                oracle,
            });
        }
    }
    Ok(EcTable {
        n,
        k,
        all_agree: rows.iter().all(|r| r.agrees),
        rows,
    })
}

pub fn run(args: &AnalyzeArgs) -> Result<AnalyzeReport> {
    let loaded = load_params(&args.params)?;
    let code = loaded.params.code();
    let n = code.length();
    let targets: Vec<usize> = match args.target {
        Some(t) => {
            check_verifier(t, n)?;
            vec![t - 1]
        }
        None => (0..n).collect(),
    };
    let dual = code.dual();
    let mut per_target = Vec::new();
    let mut analyses = Vec::new();
    for &i in &targets {
        let structure = code.access_structure(i)?;
        analyses.push(TargetAnalysis {
            target: i + 1,
            minimal_codewords: dual.minimal_codewords_wrt(i)?.iter().map(|w| values(w)).collect(),
            access_structure: structure.iter().map(|s| s.iter().map(|j| j + 1).collect()).collect(),
        });
        per_target.push((i, structure));
    }
    let ec = loaded.ec.as_ref().map(ec_table).transpose()?;
    Ok(AnalyzeReport {
        length: n,
        dimension: code.dimension(),
        min_distance: code.min_distance()?,
        dual_distance: dual.min_distance()?,
        mds: code.is_mds()?,
        threshold: threshold(code, &per_target),
        targets: analyses,
        ec,
    })
}

pub fn ec_code(args: &EcCodeArgs) -> Result<EcCodeReport> {
    let f = canonical_field(args.q, args.l)?;
    let points = args.points.as_deref().map(parse_points).transpose()?;
    let curve = EllipticCurve::new(&f, f.element(args.a as u64)?, f.element(args.b as u64)?)?;
    let all = curve.points()?;
    let affine: Vec<[u32; 2]> = all.iter().filter_map(point).collect();
    let v = match (&points, args.v) {
        (Some(p), _) => p.len(),
        (None, Some(v)) => v,
        (None, None) => affine.len(),
    };
    if args.deg >= v {
        bail!("--deg {} must be below the number of points {v}", args.deg);
    }
    let spec = ec_spec(&f, args.a, args.b, points.as_deref(), v, args.deg)?;
    let residue = spec.residue_code()?;
    Ok(EcCodeReport {
        q: args.q,
        l: args.l,
        a: args.a,
        b: args.b,
        group_order: all.len(),
        curve_points: affine,
        evaluation_points: spec.points().iter().filter_map(point).collect(),
        deg: args.deg,
        evaluation_generator: rows(spec.eval_code()?.generator()),
        residue_generator: rows(residue.generator()),
        residue_distance: residue.min_distance()?,
        residue_dual_distance: residue.dual().min_distance()?,
        table: ec_table(&spec)?,
    })
}
