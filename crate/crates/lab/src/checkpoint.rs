//! Versioned text formats for network parameters and channel realizations.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rislab_core::environment::ChannelSet;
use rislab_core::neural::{Mlp, OutputActivation};
use rislab_core::numerics::{CMatrix, CVector, C64};

const MLP_MAGIC: &str = "rislab-mlp v1";
const CHANNELS_MAGIC: &str = "rislab-channels v1";

pub fn mlp_to_text(net: &Mlp) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MLP_MAGIC}");
    let act = match net.output_activation() {
        OutputActivation::Linear => "linear",
        OutputActivation::Tanh => "tanh",
    };
    let _ = writeln!(out, "output {act}");
    let sizes: Vec<String> = net.sizes().iter().map(usize::to_string).collect();
    let _ = writeln!(out, "sizes {}", sizes.join(" "));
    let _ = writeln!(out, "params {}", net.num_params());
    for p in net.params() {
        let _ = writeln!(out, "{p}");
    }
    out
}

/// Line cursor that skips nothing and reports positions.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or_else(|| anyhow!("unexpected end of input"))
    }

    /// Next line as `tag rest…`.
    fn tagged(&mut self, tag: &str) -> Result<Vec<&'a str>> {
        let (no, line) = self.next()?;
        let mut it = line.split_whitespace();
        if it.next() != Some(tag) {
            bail!("line {no}: expected `{tag}`, found `{line}`");
        }
        Ok(it.collect())
    }

    fn float(&mut self) -> Result<f64> {
        let (no, line) = self.next()?;
        line.parse().with_context(|| format!("line {no}: `{line}`"))
    }

    fn complex(&mut self) -> Result<C64> {
        let (no, line) = self.next()?;
        let (re, im) = line
            .split_once(' ')
            .ok_or_else(|| anyhow!("line {no}: expected `re im`"))?;
        Ok(C64::new(
            re.trim().parse().with_context(|| format!("line {no}"))?,
            im.trim().parse().with_context(|| format!("line {no}"))?,
        ))
    }
}

fn parse_usizes(fields: &[&str]) -> Result<Vec<usize>> {
    fields
        .iter()
        .map(|f| f.parse().with_context(|| format!("`{f}` is not a size")))
        .collect()
}

pub fn mlp_from_text(text: &str) -> Result<Mlp> {
    let mut lines = Lines::new(text);
    let (_, magic) = lines.next()?;
    if magic != MLP_MAGIC {
        bail!("not a network checkpoint (header `{magic}`)");
    }
    let output = match lines.tagged("output")?.as_slice() {
        ["linear"] => OutputActivation::Linear,
        ["tanh"] => OutputActivation::Tanh,
        other => bail!("unknown output activation {other:?}"),
    };
    let sizes = parse_usizes(&lines.tagged("sizes")?)?;
    let count = parse_usizes(&lines.tagged("params")?)?;
    let &[count] = count.as_slice() else {
        bail!("`params` takes one count");
    };
    let params = (0..count).map(|_| lines.float()).collect::<Result<Vec<_>>>()?;
    Ok(Mlp::from_params(&sizes, output, params)?)
}

fn write_matrix(out: &mut String, tag: &str, m: &CMatrix) {
    let _ = writeln!(out, "{tag} {} {}", m.rows(), m.cols());
    for z in m.as_slice() {
        let _ = writeln!(out, "{} {}", z.re, z.im);
    }
}

fn read_matrix(lines: &mut Lines<'_>, tag: &str) -> Result<CMatrix> {
    let dims = parse_usizes(&lines.tagged(tag)?)?;
    let &[rows, cols] = dims.as_slice() else {
        bail!("`{tag}` takes rows and cols");
    };
    let data = (0..rows * cols).map(|_| lines.complex()).collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_row_major(rows, cols, data)?)
}

/// All matrices in declaration order: `H`, `h_k`, `D_k`, `E_k`, `D̂_k`.
pub fn channels_to_text(ch: &ChannelSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CHANNELS_MAGIC}");
    let _ = writeln!(out, "users {}", ch.users());
    write_matrix(&mut out, "bs_ris", &ch.bs_ris);
    for h in &ch.ris_user {
        let _ = writeln!(out, "ris_user {}", h.len());
        for z in h.iter() {
            let _ = writeln!(out, "{} {}", z.re, z.im);
        }
    }
    for m in &ch.cascaded {
        write_matrix(&mut out, "cascaded", m);
    }
    for m in &ch.errors {
        write_matrix(&mut out, "error", m);
    }
    for m in &ch.estimates {
        write_matrix(&mut out, "estimate", m);
    }
    out
}

/// Parses a channel dump and checks the derived matrices against a rebuild.
pub fn channels_from_text(text: &str) -> Result<ChannelSet> {
    let mut lines = Lines::new(text);
    let (_, magic) = lines.next()?;
    if magic != CHANNELS_MAGIC {
        bail!("not a channel dump (header `{magic}`)");
    }
    let users = parse_usizes(&lines.tagged("users")?)?;
    let &[users] = users.as_slice() else {
        bail!("`users` takes one count");
    };
    let bs_ris = read_matrix(&mut lines, "bs_ris")?;
    let mut ris_user = Vec::with_capacity(users);
    for _ in 0..users {
        let len = parse_usizes(&lines.tagged("ris_user")?)?;
        let &[len] = len.as_slice() else {
            bail!("`ris_user` takes one length");
        };
        ris_user.push(CVector::from_vec(
            (0..len).map(|_| lines.complex()).collect::<Result<_>>()?,
        ));
    }
    let cascaded = (0..users)
        .map(|_| read_matrix(&mut lines, "cascaded"))
        .collect::<Result<Vec<_>>>()?;
    let errors = (0..users)
        .map(|_| read_matrix(&mut lines, "error"))
        .collect::<Result<Vec<_>>>()?;
    let estimates = (0..users)
        .map(|_| read_matrix(&mut lines, "estimate"))
        .collect::<Result<Vec<_>>>()?;
    let rebuilt = ChannelSet::from_parts(bs_ris, ris_user, errors)?;
    if rebuilt.cascaded != cascaded || rebuilt.estimates != estimates {
        bail!("channel dump is inconsistent: derived matrices do not match H, h_k and E_k");
    }
    Ok(rebuilt)
}

pub fn save_mlp(path: &Path, net: &Mlp) -> Result<()> {
    std::fs::write(path, mlp_to_text(net)).with_context(|| format!("writing {}", path.display()))
}

pub fn load_mlp(path: &Path) -> Result<Mlp> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    mlp_from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn save_channels(path: &Path, ch: &ChannelSet) -> Result<()> {
    std::fs::write(path, channels_to_text(ch)).with_context(|| format!("writing {}", path.display()))
}

pub fn load_channels(path: &Path) -> Result<ChannelSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    channels_from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rislab_core::environment::{generate_channels, Scenario, SystemConfig};
    use rislab_core::numerics::SeededRng;

    #[test]
    fn mlp_round_trip() {
        let net = Mlp::new(&[5, 7, 3], OutputActivation::Tanh, &mut SeededRng::new(1)).unwrap();
        let back = mlp_from_text(&mlp_to_text(&net)).unwrap();
        assert_eq!(back.params(), net.params());
        assert_eq!(back.sizes(), net.sizes());
        assert_eq!(back.output_activation(), OutputActivation::Tanh);
    }

    #[test]
    fn channels_round_trip() {
        let cfg = SystemConfig {
            scenario: Scenario::Mismatch,
            elements: 4,
            ..SystemConfig::default()
        };
        let ch = generate_channels(&cfg, &mut SeededRng::new(3)).unwrap();
        assert_eq!(channels_from_text(&channels_to_text(&ch)).unwrap(), ch);
    }

    #[test]
    fn tampered_channels_rejected() {
        let cfg = SystemConfig {
            elements: 2,
            users: 1,
            antennas: 1,
            ..SystemConfig::default()
        };
        let ch = generate_channels(&cfg, &mut SeededRng::new(3)).unwrap();
        let text = channels_to_text(&ch);
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        // first cascaded entry follows magic, users, bs_ris block and ris_user block
        let idx = lines.iter().position(|l| l.starts_with("cascaded")).unwrap() + 1;
        lines[idx] = "123 456".into();
        assert!(channels_from_text(&lines.join("\n")).is_err());
        assert!(mlp_from_text("rislab-mlp v0\n").is_err());
    }
}
