use anyhow::{bail, Context, Result};
use log::info;
use subtag::codes::LinearCode;
use subtag::linalg::Matrix;
use subtag::params::{canonical_field, ec_spec, CodeSpec, ParamsFile};
use subtag::rng::Streams;
use subtag::scheme::{Constraint, PublicParams, SchemeError};

use crate::{parse_points, CodeKind, SetupArgs};

const RANDOM_CODE_ATTEMPTS: usize = 1000;

fn need<T: Copy>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.with_context(|| format!("--{flag} is required for --code {kind}"))
}

fn parse_generator(text: &str) -> Result<(usize, Vec<u64>)> {
    let rows: Vec<Vec<u64>> = text
        .split(';')
        .map(|r| r.split(',').map(|t| t.trim().parse::<u64>().map_err(Into::into)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        bail!("generator rows differ in length");
    }
    Ok((cols, rows.concat()))
}

pub fn run(args: &SetupArgs) -> Result<ParamsFile> {
    let f = canonical_field(args.q, args.l)?;
    let m = args.m.unwrap_or(args.n);
    let (pp, spec) = match args.code {
        CodeKind::Rs => {
            let v = need(args.v, "v", "rs")?;
            let kdim = need(args.kdim, "kdim", "rs")?;
            let values: Vec<u32> = match &args.points {
                Some(list) => list.iter().map(|p| p.trim().parse()).collect::<Result<_, _>>()?,
                None => (0..v as u32).collect(),
            };
            if values.len() != v {
                bail!("{} points given for --v {v}", values.len());
            }
            let points = values.iter().map(|&x| f.element(x as u64)).collect::<Result<Vec<_>, _>>()?;
            let code = LinearCode::reed_solomon(&f, &points, kdim)?;
            (PublicParams::new(&f, args.n, m, code)?, CodeSpec::ReedSolomon { points: values, kdim })
        }
        CodeKind::Ec => {
            let a = need(args.a, "a", "ec")?;
            let b = need(args.b, "b", "ec")?;
            let deg = need(args.deg, "deg", "ec")?;
            let points = args.points.as_deref().map(parse_points).transpose()?;
            let v = match (&points, args.v) {
                (Some(p), _) => p.len(),
                (None, v) => need(v, "v", "ec")?,
            };
            let s = ec_spec(&f, a, b, points.as_deref(), v, deg)?;
            (PublicParams::new(&f, args.n, m, s.residue_code()?)?, CodeSpec::from_ec(&s))
        }
        CodeKind::Random => {
            let v = need(args.v, "v", "random")?;
            let kdim = need(args.kdim, "kdim", "random")?;
            let seed = need(args.seed, "seed", "random")?;
            let mut rng = Streams::new(seed).stream("code");
            let mut attempt = 0;
            loop {
                attempt += 1;
                let code = LinearCode::from_generator(Matrix::random_full_rank(&f, kdim, v, &mut rng)?)?;
                match PublicParams::new(&f, args.n, m, code) {
                    Ok(pp) => {
                        info!("random code found after {attempt} draws");
                        break (pp, CodeSpec::Generator);
                    }
                    Err(SchemeError::InvalidParams(c)) if attempt < RANDOM_CODE_ATTEMPTS && matches!(c, Constraint::CodeDistance | Constraint::DualDistance) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
        }
        CodeKind::Generator => {
            let text = args.generator.as_deref().context("--generator is required for --code generator")?;
            let (cols, values) = parse_generator(text)?;
            let rows = values.len().checked_div(cols).unwrap_or(0);
            let code = LinearCode::from_generator(Matrix::from_values(&f, rows, cols, &values)?)?;
            (PublicParams::new(&f, args.n, m, code)?, CodeSpec::Generator)
        }
    };
    Ok(ParamsFile::new(&pp, spec))
}
