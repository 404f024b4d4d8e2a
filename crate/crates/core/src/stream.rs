//! Incremental processing of streamed audio.
//!
//! Fixed-length buffers (170 ms) are grouped into blocks of three (510 ms).
//! Each completed block slides into a four-block (2,040 ms) context window,
//! evicting the oldest; slots with no history yet hold zeros. The enhancer
//! sees the whole window and the newest block's span of its output is
//! emitted. Nothing is emitted before a block completes and no future audio
//! is required.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::Waveform;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StreamError {
    #[error("buffer has {actual} samples, expected {expected}")]
    WrongBufferLength { expected: usize, actual: usize },
    #[error("invalid stream geometry: {0}")]
    Geometry(String),
    #[error("enhancer returned {actual} samples for a {expected}-sample window")]
    LengthChanged { expected: usize, actual: usize },
    #[error("enhancer failed: {0}")]
    Enhancer(String),
    #[error("non-finite sample in buffer")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StreamGeometry {
    pub buffer_ms: u32,
    pub buffers_per_block: usize,
    pub blocks_per_window: usize,
    /// Raised-cosine crossfade between consecutive emitted blocks; 0 disables it.
    pub crossfade_ms: u32,
}

impl Default for StreamGeometry {
    fn default() -> Self {
        Self { buffer_ms: 170, buffers_per_block: 3, blocks_per_window: 4, crossfade_ms: 0 }
    }
}

impl StreamGeometry {
    pub fn validate(&self, sample_rate: u32) -> Result<(), StreamError> {
        let err = |m: String| Err(StreamError::Geometry(m));
        if sample_rate == 0 {
            return err("sample rate must be > 0".into());
        }
        if self.buffer_ms == 0 || self.buffers_per_block == 0 || self.blocks_per_window == 0 {
            return err(format!("all sizes must be positive: {self:?}"));
        }
        if !(sample_rate as u64 * self.buffer_ms as u64).is_multiple_of(1000) {
            return err(format!("{} ms is not a whole number of samples at {sample_rate} Hz", self.buffer_ms));
        }
        if !(sample_rate as u64 * self.crossfade_ms as u64).is_multiple_of(1000) {
            return err(format!("crossfade {} ms is not a whole number of samples", self.crossfade_ms));
        }
        if self.crossfade_samples(sample_rate) >= self.block_len(sample_rate) {
            return err("crossfade must be shorter than a block".into());
        }
        if self.crossfade_ms > 0 && self.blocks_per_window < 2 {
            return err("crossfade needs at least two blocks per window".into());
        }
        Ok(())
    }

    pub fn buffer_len(&self, sample_rate: u32) -> usize {
        (sample_rate as u64 * self.buffer_ms as u64 / 1000) as usize
    }

    pub fn block_len(&self, sample_rate: u32) -> usize {
        self.buffer_len(sample_rate) * self.buffers_per_block
    }

    pub fn window_len(&self, sample_rate: u32) -> usize {
        self.block_len(sample_rate) * self.blocks_per_window
    }

    pub fn crossfade_samples(&self, sample_rate: u32) -> usize {
        (sample_rate as u64 * self.crossfade_ms as u64 / 1000) as usize
    }
}

/// Where a window sits in the stream: `end` is the absolute index one past
/// its last sample (zero-padding at flush included).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowPosition {
    pub end: usize,
}

/// A fixed-input-length enhancer. Must return as many samples as it receives.
pub trait Enhancer {
    fn enhance(&mut self, window: &Waveform, position: WindowPosition) -> Result<Waveform, StreamError>;
}

/// Returns the window unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityEnhancer;

impl Enhancer for IdentityEnhancer {
    fn enhance(&mut self, window: &Waveform, _: WindowPosition) -> Result<Waveform, StreamError> {
        Ok(window.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmittedBlock {
    /// 1-based index of the block this output belongs to.
    pub index: u64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StreamState {
    geometry: StreamGeometry,
    sample_rate: u32,
    ring: VecDeque<Vec<f64>>,
    pending: Vec<f64>,
    blocks: u64,
    held_tail: Vec<f64>,
}

impl StreamState {
    pub fn new(geometry: StreamGeometry, sample_rate: u32) -> Result<Self, StreamError> {
        geometry.validate(sample_rate)?;
        let block = geometry.block_len(sample_rate);
        Ok(Self {
            geometry,
            sample_rate,
            ring: (0..geometry.blocks_per_window).map(|_| vec![0.0; block]).collect(),
            pending: Vec::with_capacity(block),
            blocks: 0,
            held_tail: Vec::new(),
        })
    }

    pub fn geometry(&self) -> &StreamGeometry {
        &self.geometry
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn buffer_len(&self) -> usize {
        self.geometry.buffer_len(self.sample_rate)
    }

    pub fn block_len(&self) -> usize {
        self.geometry.block_len(self.sample_rate)
    }

    /// Completed blocks ingested so far.
    pub fn blocks_completed(&self) -> u64 {
        self.blocks
    }

    /// Buffers received since the last completed block.
    pub fn pending_buffers(&self) -> usize {
        self.pending.len() / self.buffer_len()
    }

    /// The context window, oldest block first.
    pub fn assemble_window(&self) -> Waveform {
        let samples: Vec<f64> = self.ring.iter().flatten().copied().collect();
        Waveform::new(samples, self.sample_rate).expect("ring holds finite samples")
    }

    pub fn push_buffer(&mut self, buffer: &[f64], e: &mut dyn Enhancer) -> Result<Option<EmittedBlock>, StreamError> {
        if buffer.len() != self.buffer_len() {
            return Err(StreamError::WrongBufferLength { expected: self.buffer_len(), actual: buffer.len() });
        }
        if buffer.iter().any(|v| !v.is_finite()) {
            return Err(StreamError::NonFinite);
        }
        self.pending.extend_from_slice(buffer);
        if self.pending.len() < self.block_len() {
            return Ok(None);
        }
        let block = std::mem::take(&mut self.pending);
        let block_len = block.len();
        self.ingest(block, e, block_len, false).map(Some)
    }

    /// Zero-pads any pending buffers into a final block and emits its real
    /// samples. With crossfading enabled, also releases the held tail.
    pub fn flush(&mut self, e: &mut dyn Enhancer) -> Result<Option<EmittedBlock>, StreamError> {
        if self.pending.is_empty() {
            if self.held_tail.is_empty() {
                return Ok(None);
            }
            let samples = std::mem::take(&mut self.held_tail);
            return Ok(Some(EmittedBlock { index: self.blocks, samples }));
        }
        let real = self.pending.len();
        let mut block = std::mem::take(&mut self.pending);
        block.resize(self.block_len(), 0.0);
        self.ingest(block, e, real, true).map(Some)
    }

    fn ingest(
        &mut self,
        block: Vec<f64>,
        e: &mut dyn Enhancer,
        real: usize,
        last: bool,
    ) -> Result<EmittedBlock, StreamError> {
        let block_len = self.block_len();
        self.ring.pop_front();
        self.ring.push_back(block);
        self.blocks += 1;

        let window = self.assemble_window();
        let window_len = window.len();
        let position = WindowPosition { end: self.blocks as usize * block_len };
        let enhanced = e.enhance(&window, position)?;
        if enhanced.len() != window_len {
            return Err(StreamError::LengthChanged { expected: window_len, actual: enhanced.len() });
        }
        let out = enhanced.samples();
        let newest = &out[window_len - block_len..];

        let xf = self.geometry.crossfade_samples(self.sample_rate);
        if xf == 0 {
            return Ok(EmittedBlock { index: self.blocks, samples: newest[..real].to_vec() });
        }

        // Blend the held tail of the previous emission with this window's
        // rendering of the same samples, then hold back this block's tail.
        let mut samples = Vec::with_capacity(block_len);
        if !self.held_tail.is_empty() {
            let overlap = &out[window_len - block_len - xf..window_len - block_len];
            for (i, (old, new)) in self.held_tail.iter().zip(overlap).enumerate() {
                let fade_in = 0.5 - 0.5 * (PI * (i as f64 + 0.5) / xf as f64).cos();
                samples.push(old * (1.0 - fade_in) + new * fade_in);
            }
        }
        if last {
            samples.extend_from_slice(&newest[..real]);
            self.held_tail.clear();
        } else {
            samples.extend_from_slice(&newest[..block_len - xf]);
            self.held_tail = newest[block_len - xf..].to_vec();
        }
        Ok(EmittedBlock { index: self.blocks, samples })
    }
}

/// Streams a whole signal through a fresh [`StreamState`]: slices it into
/// buffers, zero-pads the final partial buffer, flushes, and trims the
/// output to the input length.
pub fn stream_waveform(
    input: &Waveform,
    geometry: StreamGeometry,
    e: &mut dyn Enhancer,
) -> Result<Waveform, StreamError> {
    let mut state = StreamState::new(geometry, input.sample_rate())?;
    let buffer_len = state.buffer_len();
    let mut out = Vec::with_capacity(input.len() + state.block_len());
    for chunk in input.samples().chunks(buffer_len) {
        let emitted = if chunk.len() == buffer_len {
            state.push_buffer(chunk, e)?
        } else {
            let mut padded = chunk.to_vec();
            padded.resize(buffer_len, 0.0);
            state.push_buffer(&padded, e)?
        };
        if let Some(block) = emitted {
            out.extend(block.samples);
        }
    }
    if let Some(block) = state.flush(e)? {
        out.extend(block.samples);
    }
    out.truncate(input.len());
    Ok(Waveform::new(out, input.sample_rate()).expect("enhancer output checked finite"))
}

/// Processing without incremental context: the signal is cut into
/// consecutive windows (the last one zero-padded), each enhanced on its own.
pub fn process_segmented(input: &Waveform, window_len: usize, e: &mut dyn Enhancer) -> Result<Waveform, StreamError> {
    if window_len == 0 {
        return Err(StreamError::Geometry("window length must be > 0".into()));
    }
    let mut out = Vec::with_capacity(input.len() + window_len);
    for (i, chunk) in input.samples().chunks(window_len).enumerate() {
        let mut segment = chunk.to_vec();
        segment.resize(window_len, 0.0);
        let segment = Waveform::new(segment, input.sample_rate()).expect("input is finite");
        let enhanced = e.enhance(&segment, WindowPosition { end: (i + 1) * window_len })?;
        if enhanced.len() != window_len {
            return Err(StreamError::LengthChanged { expected: window_len, actual: enhanced.len() });
        }
        out.extend_from_slice(&enhanced.samples()[..chunk.len()]);
    }
    Ok(Waveform::new(out, input.sample_rate()).expect("enhancer output is finite"))
}
