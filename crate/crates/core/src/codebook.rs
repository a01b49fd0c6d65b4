//! Random vector quantization codebooks and the max-gain quantizer.

use crate::channel::{inner, sample_channel, ChannelVector};
use crate::error::{domain, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MAX_BITS: u32 = 16;
const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    vectors: Vec<ChannelVector>,
    bits: u32,
}

/// On-disk layout: each vector is an array of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct CodebookFile {
    bits: u32,
    vectors: Vec<Vec<[f64; 2]>>,
}

impl Codebook {
    pub fn new(vectors: Vec<ChannelVector>, bits: u32) -> Result<Self> {
        if !(1..=MAX_BITS).contains(&bits) {
            return domain(format!("bits must be in 1..={MAX_BITS}, got {bits}"));
        }
        if vectors.len() != 1usize << bits {
            return domain(format!(
                "expected {} vectors, got {}",
                1usize << bits,
                vectors.len()
            ));
        }
        let n = vectors[0].len();
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != n || n == 0 {
                return domain(format!("vector {i} has length {}, expected {n}", v.len()));
            }
            if (v.norm_sqr().sqrt() - 1.0).abs() > UNIT_NORM_TOL {
                return domain(format!("vector {i} is not unit norm"));
            }
        }
        Ok(Self { vectors, bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn n_antennas(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[ChannelVector] {
        &self.vectors
    }

    pub fn get(&self, index: usize) -> &ChannelVector {
        &self.vectors[index]
    }

    pub fn to_json(&self) -> String {
        let file = CodebookFile {
            bits: self.bits,
            vectors: self
                .vectors
                .iter()
                .map(|v| v.entries.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("codebook serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodebookFile = match serde_json::from_str(text) {
            Ok(f) => f,
            Err(e) => return domain(format!("bad codebook JSON: {e}")),
        };
        let vectors = file
            .vectors
            .into_iter()
            .map(|v| {
                ChannelVector::new(
                    v.into_iter()
                        .map(|[re, im]| Complex64::new(re, im))
                        .collect(),
                )
            })
            .collect();
        Self::new(vectors, file.bits)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn load(path: &Path) -> std::io::Result<Result<Self>> {
        Ok(Self::from_json(&std::fs::read_to_string(path)?))
    }
}

/// 2^bits vectors drawn uniformly on the complex unit sphere.
pub fn generate_rvq<R: Rng + ?Sized>(
    n_antennas: usize,
    bits: u32,
    rng: &mut R,
) -> Result<Codebook> {
    if n_antennas < 1 {
        return domain("codebook needs at least one antenna");
    }
    if !(1..=MAX_BITS).contains(&bits) {
        return domain(format!("bits must be in 1..={MAX_BITS}, got {bits}"));
    }
    let vectors = (0..1usize << bits)
        .map(|_| sample_channel(n_antennas, rng).map(|v| v.normalized()))
        .collect::<Result<Vec<_>>>()?;
    Codebook::new(vectors, bits)
}

/// Index of the codeword with the largest |h^H f|^2 and that gain.
/// Ties go to the lowest index.
pub fn quantize_with_gain(h: &ChannelVector, cb: &Codebook) -> Result<(usize, f64)> {
    if h.len() != cb.n_antennas() {
        return domain(format!(
            "channel length {} vs codebook {}",
            h.len(),
            cb.n_antennas()
        ));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, f) in cb.vectors.iter().enumerate() {
        let g = inner(h, f).norm_sqr();
        if g > best.1 {
            best = (i, g);
        }
    }
    Ok(best)
}

pub fn quantize(h: &ChannelVector, cb: &Codebook) -> Result<usize> {
    quantize_with_gain(h, cb).map(|(i, _)| i)
}

/// Quantization loss parameter 2^(-B/(N-1)).
pub fn gersho_delta(n_antennas: usize, bits: u32) -> Result<f64> {
    if n_antennas < 2 {
        return domain("delta is undefined for fewer than two antennas");
    }
    Ok(2f64.powf(-(bits as f64) / (n_antennas as f64 - 1.0)))
}
