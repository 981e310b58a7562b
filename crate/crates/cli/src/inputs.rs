//! Parsers for command-line values and input files.

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use opdecay::measure::MeasureSpec;
use opdecay::opuc::VerblunskyCoeffs;

/// An input file read while handling a command; its bytes enter the input hash.
#[derive(Clone, Debug)]
pub struct InputFile {
    pub label: String,
    pub bytes: Vec<u8>,
}

pub fn read_input(path: &Path) -> Result<InputFile> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InputFile {
        label: path.display().to_string(),
        bytes,
    })
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim();
    Complex64::from_str(t).map_err(|_| anyhow!("`{t}` is not a number"))
}

pub fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("`{}` is not a real number", t.trim()))
        })
        .collect()
}

pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_complex)
        .collect()
}

/// `lo:hi:count` with `count >= 2`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        bail!("grid `{s}` is not of the form lo:hi:count")
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("grid start `{lo}`"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("grid end `{hi}`"))?;
    let count: usize = count
        .trim()
        .parse()
        .with_context(|| format!("grid count `{count}`"))?;
    if count < 2 || hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        bail!("grid `{s}` needs lo < hi and at least two points");
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect())
}

/// `L,M` degrees of a Padé approximant.
pub fn parse_degrees(s: &str) -> Result<(usize, usize)> {
    let (l, m) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("degrees `{s}` are not of the form L,M"))?;
    Ok((l.trim().parse()?, m.trim().parse()?))
}

fn key_values(body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| anyhow!("expected key=value, got `{kv}`"))?;
            Ok((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect()
}

fn lookup<'a>(kv: &'a [(String, String)], key: &str) -> Result<&'a str> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| anyhow!("missing `{key}=`"))
}

/// Coefficient sequence from `geometric:C=..,R=..`, `constant:c=..`,
/// `list:a,b,..` (or a bare list), or `file:PATH` with one value per line.
/// Generated sequences hold `len` terms; lists are followed by zeros.
pub fn parse_alpha(spec: &str, len: usize) -> Result<(VerblunskyCoeffs, Option<InputFile>)> {
    let (kind, body) = spec.split_once(':').unwrap_or(("list", spec));
    let ctx = || format!("coefficient spec `{spec}`");
    let coeffs = match kind.trim() {
        "geometric" => {
            let kv = key_values(body).with_context(ctx)?;
            let c = parse_complex(lookup(&kv, "c")?).with_context(ctx)?;
            let r: f64 = lookup(&kv, "r")?
                .parse()
                .map_err(|_| anyhow!("R is not a real number"))
                .with_context(ctx)?;
            VerblunskyCoeffs::geometric(c, r, len)?
        }
        "constant" => {
            let kv = key_values(body).with_context(ctx)?;
            VerblunskyCoeffs::constant(parse_complex(lookup(&kv, "c")?).with_context(ctx)?, len)?
        }
        "list" => VerblunskyCoeffs::zero_after(parse_complex_list(body).with_context(ctx)?)?,
        "file" => {
            let file = read_input(Path::new(body.trim()))?;
            let text = String::from_utf8(file.bytes.clone())
                .with_context(|| format!("{} is not UTF-8", file.label))?;
            let mut values = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let t = line.split('#').next().unwrap_or("").trim();
                if t.is_empty() {
                    continue;
                }
                values.push(
                    parse_complex(t).with_context(|| format!("{} line {}", file.label, i + 1))?,
                );
            }
            return Ok((VerblunskyCoeffs::zero_after(values)?, Some(file)));
        }
        other => bail!(
            "unknown coefficient generator `{other}` (expected geometric, constant, list or file)"
        ),
    };
    Ok((coeffs, None))
}

pub fn parse_measure(path: &Path) -> Result<(MeasureSpec, InputFile)> {
    let file = read_input(path)?;
    let text =
        std::str::from_utf8(&file.bytes).with_context(|| format!("{} is not UTF-8", file.label))?;
    let spec: MeasureSpec =
        toml::from_str(text).with_context(|| format!("parsing measure {}", file.label))?;
    Ok((spec, file))
}
