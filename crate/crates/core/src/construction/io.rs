//! Text exports of a sequence and the matching reader.
//!
//! The record format is line oriented: a `key = value` header, then one
//! `[level]` block per level with keys `n`, `epsilon`, `gamma` and `net`
//! (space-separated ground indices).

use std::path::Path;
use std::sync::Arc;

use super::{AdjustedSequence, BuildStatus, ConstructionError, Level};
use crate::format_real;
use crate::metric::MetricGround;
use crate::{Error, Result};

/// Structured text record of the sequence.
pub fn sequence_record(seq: &AdjustedSequence) -> String {
    let mut out = String::new();
    out.push_str("# adjusted approximative sequence\n");
    out.push_str(&format!("ground_points = {}\n", seq.ground().len()));
    out.push_str(&format!(
        "density = {}\n",
        format_real(seq.ground().density())
    ));
    out.push_str(&format!("safety = {}\n", format_real(seq.safety())));
    out.push_str(&format!("status = {}\n", seq.status()));
    for level in seq.levels() {
        out.push_str("\n[level]\n");
        out.push_str(&format!("n = {}\n", level.index));
        out.push_str(&format!("epsilon = {}\n", format_real(level.epsilon)));
        out.push_str(&format!("gamma = {}\n", format_real(level.gamma)));
        let net: Vec<String> = level.net.iter().map(usize::to_string).collect();
        out.push_str(&format!("net = {}\n", net.join(" ")));
    }
    out
}

/// CSV `n,epsilon,gamma,net_size`.
pub fn sequence_csv(seq: &AdjustedSequence) -> String {
    let mut out = String::from("n,epsilon,gamma,net_size\n");
    for level in seq.levels() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            level.index,
            format_real(level.epsilon),
            format_real(level.gamma),
            level.net.len()
        ));
    }
    out
}

/// Writes `sequence.txt` and `sequence.csv` into `dir`.
pub fn write_sequence(seq: &AdjustedSequence, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let txt = dir.join("sequence.txt");
    std::fs::write(&txt, sequence_record(seq)).map_err(|e| Error::io(&txt, e))?;
    let csv = dir.join("sequence.csv");
    std::fs::write(&csv, sequence_csv(seq)).map_err(|e| Error::io(&csv, e))?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> ConstructionError {
    ConstructionError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_real(value: &str, line: usize) -> Result<f64, ConstructionError> {
    value
        .parse::<f64>()
        .map_err(|e| parse_err(line, format!("`{value}`: {e}")))
}

fn parse_status(value: &str, line: usize) -> Result<BuildStatus, ConstructionError> {
    let mut words = value.split_whitespace();
    match words.next() {
        Some("complete") => Ok(BuildStatus::Complete),
        Some("stopped_at_resolution") => {
            let (mut built, mut next_epsilon, mut floor) = (None, None, None);
            for word in words {
                let (key, val) = word
                    .split_once('=')
                    .ok_or_else(|| parse_err(line, format!("bad status field `{word}`")))?;
                match key {
                    "built" => {
                        built = Some(val.parse().map_err(|_| parse_err(line, "bad `built`"))?)
                    }
                    "next_epsilon" => next_epsilon = Some(parse_real(val, line)?),
                    "floor" => floor = Some(parse_real(val, line)?),
                    _ => return Err(parse_err(line, format!("unknown status field `{key}`"))),
                }
            }
            match (built, next_epsilon, floor) {
                (Some(built), Some(next_epsilon), Some(floor)) => {
                    Ok(BuildStatus::StoppedAtResolution {
                        built,
                        next_epsilon,
                        floor,
                    })
                }
                _ => Err(parse_err(line, "incomplete status")),
            }
        }
        _ => Err(parse_err(line, format!("unknown status `{value}`"))),
    }
}

/// Parses a record written by [`sequence_record`]. The sequence is not
/// validated beyond net indices; call
/// [`AdjustedSequence::violations`] for that.
pub fn read_sequence(text: &str, ground: Arc<MetricGround>) -> Result<AdjustedSequence> {
    let mut safety = None;
    let mut status = BuildStatus::Complete;
    let mut levels: Vec<Level> = Vec::new();
    let mut current: Option<(
        usize,
        Option<usize>,
        Option<f64>,
        Option<f64>,
        Option<Vec<usize>>,
    )> = None;

    let finish = |block: (
        usize,
        Option<usize>,
        Option<f64>,
        Option<f64>,
        Option<Vec<usize>>,
    )|
     -> Result<Level, ConstructionError> {
        let (line, n, eps, gamma, net) = block;
        Ok(Level {
            index: n.ok_or_else(|| parse_err(line, "level without `n`"))?,
            epsilon: eps.ok_or_else(|| parse_err(line, "level without `epsilon`"))?,
            gamma: gamma.ok_or_else(|| parse_err(line, "level without `gamma`"))?,
            net: net.ok_or_else(|| parse_err(line, "level without `net`"))?,
        })
    };

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed == "[level]" {
            if let Some(block) = current.take() {
                levels.push(finish(block)?);
            }
            current = Some((line, None, None, None, None));
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got `{trimmed}`")))?;
        match current.as_mut() {
            None => match key {
                "safety" => safety = Some(parse_real(value, line)?),
                "status" => status = parse_status(value, line)?,
                "ground_points" => {
                    let count: usize = value
                        .parse()
                        .map_err(|_| parse_err(line, "bad `ground_points`"))?;
                    if count != ground.len() {
                        return Err(parse_err(
                            line,
                            format!(
                                "sequence was built on {count} ground points, ground has {}",
                                ground.len()
                            ),
                        )
                        .into());
                    }
                }
                "density" => {}
                _ => return Err(parse_err(line, format!("unknown key `{key}`")).into()),
            },
            Some(block) => match key {
                "n" => block.1 = Some(value.parse().map_err(|_| parse_err(line, "bad `n`"))?),
                "epsilon" => block.2 = Some(parse_real(value, line)?),
                "gamma" => block.3 = Some(parse_real(value, line)?),
                "net" => {
                    let net = value
                        .split_whitespace()
                        .map(|v| v.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| parse_err(line, format!("bad net index: {e}")))?;
                    block.4 = Some(net);
                }
                _ => return Err(parse_err(line, format!("unknown level key `{key}`")).into()),
            },
        }
    }
    if let Some(block) = current.take() {
        levels.push(finish(block)?);
    }
    let safety = safety.ok_or_else(|| parse_err(0, "missing `safety`"))?;
    Ok(AdjustedSequence::from_parts(
        ground, levels, safety, status,
    )?)
}
