//! Scenario files: JSON lines, one frame per line.
//!
//! The first line is a header carrying the config echo, seed, landmarks, and
//! per-agent ground truth; each following line is one frame.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::SimConfig;
use super::scenario::{AgentTruth, Frame, Scenario};

#[derive(Serialize, Deserialize)]
struct Header {
    config: SimConfig,
    seed: u64,
    landmarks_gt: Vec<[f64; 3]>,
    agents_gt: Vec<AgentTruth>,
    num_frames: usize,
}

pub fn write_scenario<W: Write>(scenario: &Scenario, mut w: W) -> Result<()> {
    let header = Header {
        config: scenario.config.clone(),
        seed: scenario.seed,
        landmarks_gt: scenario.landmarks_gt.clone(),
        agents_gt: scenario.agents_gt.clone(),
        num_frames: scenario.frames.len(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for frame in &scenario.frames {
        serde_json::to_writer(&mut w, frame)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_scenario<R: Read>(r: R) -> Result<Scenario> {
    let mut lines = BufReader::new(r).lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Eval("scenario file is empty".into()))??;
    let header: Header = serde_json::from_str(&header_line)?;
    let mut frames = Vec::with_capacity(header.num_frames);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let frame: Frame = serde_json::from_str(&line)?;
        frames.push(frame);
    }
    if frames.len() != header.num_frames {
        return Err(Error::Eval(format!(
            "header declares {} frames, file holds {}",
            header.num_frames,
            frames.len()
        )));
    }
    Ok(Scenario {
        config: header.config,
        seed: header.seed,
        landmarks_gt: header.landmarks_gt,
        agents_gt: header.agents_gt,
        frames,
    })
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_scenario(scenario, std::io::BufWriter::new(file))
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let file = std::fs::File::open(path)?;
    read_scenario(file)
}
