//! RIFF/WAVE PCM16 reading and writing.
//!
//! Loading accepts any chunk layout with a `fmt ` chunk before `data`,
//! skipping unknown chunks (`LIST`, `fact`, ...). Samples are normalised by
//! 1/32768; multichannel audio is averaged down to mono. Saving always
//! writes the canonical 44-byte mono PCM16 header.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::signal::Signal;

const FORMAT_PCM: u16 = 1;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Pcm16,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AudioFile {
    pub signal: Signal,
    pub source_path: PathBuf,
    pub bit_depth: BitDepth,
    /// Always 1 after loading.
    pub channels: u16,
    pub warnings: Vec<String>,
}

impl AudioFile {
    pub fn new(signal: Signal) -> Self {
        Self {
            signal,
            source_path: PathBuf::new(),
            bit_depth: BitDepth::Pcm16,
            channels: 1,
            warnings: Vec::new(),
        }
    }
}

fn malformed(offset: usize, reason: impl Into<String>) -> Error {
    Error::MalformedWav {
        offset,
        reason: reason.into(),
    }
}

fn read_u16(bytes: &[u8], offset: usize) -> Result<u16> {
    bytes
        .get(offset..offset + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| malformed(offset, "unexpected end of data"))
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| malformed(offset, "unexpected end of data"))
}

struct Format {
    channels: u16,
    sample_rate: u32,
}

fn parse_fmt(bytes: &[u8], offset: usize, size: usize) -> Result<Format> {
    if size < 16 {
        return Err(malformed(offset, format!("fmt chunk too small ({size} bytes)")));
    }
    let tag = read_u16(bytes, offset)?;
    let channels = read_u16(bytes, offset + 2)?;
    let sample_rate = read_u32(bytes, offset + 4)?;
    let block_align = read_u16(bytes, offset + 12)?;
    let bits = read_u16(bytes, offset + 14)?;

    let pcm = match tag {
        FORMAT_PCM => true,
        // extensible: the sub-format GUID starts with the format tag
        FORMAT_EXTENSIBLE if size >= 26 => read_u16(bytes, offset + 24)? == FORMAT_PCM,
        _ => false,
    };
    if !pcm {
        return Err(Error::UnsupportedEncoding {
            offset,
            reason: format!("format tag {tag:#06x}"),
        });
    }
    if bits != 16 {
        return Err(Error::UnsupportedEncoding {
            offset: offset + 14,
            reason: format!("{bits} bits per sample"),
        });
    }
    if channels == 0 {
        return Err(malformed(offset + 2, "zero channels"));
    }
    if sample_rate == 0 {
        return Err(malformed(offset + 4, "zero sample rate"));
    }
    if block_align as usize != 2 * channels as usize {
        return Err(malformed(offset + 12, format!("block align {block_align} for {channels} channels")));
    }
    Ok(Format { channels, sample_rate })
}

/// Decodes a PCM16 RIFF/WAVE byte buffer.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioFile> {
    if bytes.get(0..4) != Some(b"RIFF") {
        return Err(malformed(0, "missing RIFF tag"));
    }
    read_u32(bytes, 4)?;
    if bytes.get(8..12) != Some(b"WAVE") {
        return Err(malformed(8, "missing WAVE tag"));
    }

    let mut offset = 12;
    let mut format: Option<Format> = None;
    loop {
        if offset + 8 > bytes.len() {
            return Err(malformed(offset, "no data chunk"));
        }
        let id = &bytes[offset..offset + 4];
        let size = read_u32(bytes, offset + 4)? as usize;
        let body = offset + 8;
        match id {
            b"fmt " => {
                if body + size > bytes.len() {
                    return Err(malformed(offset + 4, "fmt chunk runs past end of file"));
                }
                format = Some(parse_fmt(bytes, body, size)?);
            }
            b"data" => {
                let fmt = format.ok_or_else(|| malformed(offset, "data chunk before fmt chunk"))?;
                // tolerate a data size that overruns a truncated file
                let available = size.min(bytes.len() - body);
                return decode_samples(&bytes[body..body + available], body, fmt);
            }
            _ => {}
        }
        // chunks are word aligned
        offset = body
            .checked_add(size + (size & 1))
            .ok_or_else(|| malformed(offset + 4, "chunk size overflow"))?;
    }
}

fn decode_samples(data: &[u8], offset: usize, fmt: Format) -> Result<AudioFile> {
    let frame_bytes = 2 * fmt.channels as usize;
    let frames = data.len() / frame_bytes;
    if frames == 0 {
        return Err(malformed(offset, "data chunk holds no samples"));
    }
    let samples: Vec<f64> = data
        .chunks_exact(frame_bytes)
        .map(|frame| {
            let sum: f64 = frame
                .chunks_exact(2)
                .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)
                .sum();
            sum / fmt.channels as f64
        })
        .collect();

    let mut warnings = Vec::new();
    if fmt.channels > 1 {
        warnings.push(format!("averaged {} channels down to mono", fmt.channels));
    }
    if !data.len().is_multiple_of(frame_bytes) {
        warnings.push(format!("ignored {} trailing bytes", data.len() % frame_bytes));
    }
    Ok(AudioFile {
        signal: Signal::new(samples, fmt.sample_rate)?,
        source_path: PathBuf::new(),
        bit_depth: BitDepth::Pcm16,
        channels: 1,
        warnings,
    })
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioFile> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut audio = decode_wav(&bytes)?;
    audio.source_path = path.to_path_buf();
    Ok(audio)
}

/// Quantises to PCM16 on the loader's 1/32768 grid, saturating at the i16
/// range, so that a save/load round trip moves a sample in [-1, 1] by at
/// most half a step (a full step at +1).
pub fn quantize(x: f64) -> i16 {
    (x.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

/// Encodes mono PCM16 with a canonical 44-byte header.
pub fn encode_wav(samples: &[f64], sample_rate_hz: u32) -> Result<Vec<u8>> {
    if samples.is_empty() {
        return Err(Error::EmptySignal);
    }
    let data_len = u32::try_from(samples.len() * 2)
        .map_err(|_| Error::InvalidConfig("signal too long for a WAV file".into()))?;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &x in samples {
        out.extend_from_slice(&quantize(x).to_le_bytes());
    }
    Ok(out)
}

pub fn save_wav(audio: &AudioFile, path: impl AsRef<Path>) -> Result<()> {
    save_signal(&audio.signal, path)
}

pub fn save_signal(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_wav(signal.samples(), signal.sample_rate_hz())?;
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(channels: u16, rate: u32, tag: u16, bits: u16, data: &[u8], extra_chunk: Option<(&[u8; 4], &[u8])>) -> Vec<u8> {
        let mut fmt = Vec::new();
        fmt.extend_from_slice(&tag.to_le_bytes());
        fmt.extend_from_slice(&channels.to_le_bytes());
        fmt.extend_from_slice(&rate.to_le_bytes());
        fmt.extend_from_slice(&(rate * channels as u32 * bits as u32 / 8).to_le_bytes());
        fmt.extend_from_slice(&(channels * bits / 8).to_le_bytes());
        fmt.extend_from_slice(&bits.to_le_bytes());

        let mut body = b"WAVE".to_vec();
        let mut chunk = |id: &[u8], payload: &[u8]| {
            body.extend_from_slice(id);
            body.extend_from_slice(&(payload.len() as u32).to_le_bytes());
            body.extend_from_slice(payload);
            if payload.len() % 2 == 1 {
                body.push(0);
            }
        };
        chunk(b"fmt ", &fmt);
        if let Some((id, payload)) = extra_chunk {
            chunk(id, payload);
        }
        chunk(b"data", data);
        let mut out = b"RIFF".to_vec();
        out.extend_from_slice(&(body.len() as u32).to_le_bytes());
        out.extend_from_slice(&body);
        out
    }

    fn pcm(values: &[i16]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    #[test]
    fn silence() {
        let a = decode_wav(&header(1, 8000, 1, 16, &vec![0u8; 16000], None)).unwrap();
        assert_eq!(a.signal.samples(), &vec![0.0; 8000][..]);
        assert_eq!(a.signal.sample_rate_hz(), 8000);
        assert!(a.warnings.is_empty());
    }

    #[test]
    fn extreme_values_normalise() {
        let a = decode_wav(&header(1, 8000, 1, 16, &pcm(&[32767, -32768]), None)).unwrap();
        assert_eq!(a.signal.samples(), &[32767.0 / 32768.0, -1.0]);
    }

    #[test]
    fn stereo_is_averaged() {
        let a = decode_wav(&header(2, 16000, 1, 16, &pcm(&[100, 100, -7, -7, 5, 5]), None)).unwrap();
        assert_eq!(a.signal.samples(), &[100.0 / 32768.0, -7.0 / 32768.0, 5.0 / 32768.0]);
        assert_eq!(a.channels, 1);
        assert_eq!(a.warnings.len(), 1);
    }

    #[test]
    fn skips_list_chunks() {
        let bytes = header(1, 8000, 1, 16, &pcm(&[1, 2, 3]), Some((b"LIST", b"INFOabc")));
        let a = decode_wav(&bytes).unwrap();
        assert_eq!(a.signal.len(), 3);
    }

    #[test]
    fn rejects_other_encodings() {
        let err = decode_wav(&header(1, 8000, 3, 32, &[0u8; 8], None)).unwrap_err();
        assert!(matches!(err, Error::UnsupportedEncoding { offset: 20, .. }), "{err}");
        let err = decode_wav(&header(1, 8000, 1, 8, &[0u8; 8], None)).unwrap_err();
        assert!(matches!(err, Error::UnsupportedEncoding { offset: 34, .. }), "{err}");
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(decode_wav(b"RIFX"), Err(Error::MalformedWav { offset: 0, .. })));
        let mut bytes = header(1, 8000, 1, 16, &pcm(&[1]), None);
        bytes[8] = b'X';
        assert!(matches!(decode_wav(&bytes), Err(Error::MalformedWav { offset: 8, .. })));
        let bytes = header(1, 8000, 1, 16, &pcm(&[1, 2]), None);
        assert!(decode_wav(&bytes[..40]).is_err());
        assert!(decode_wav(&bytes[..44]).is_err());
    }

    #[test]
    fn quantisation_rules() {
        assert_eq!(quantize(1.5), 32767);
        assert_eq!(quantize(1.0), 32767);
        assert_eq!(quantize(-3.0), -32768);
        assert_eq!(quantize(0.5), 16384);
        assert_eq!(quantize(-0.5), -16384);
        for k in [-32768i16, -1, 0, 1, 12345, 32767] {
            assert_eq!(quantize(k as f64 / 32768.0), k);
        }
        assert!(matches!(encode_wav(&[], 8000), Err(Error::EmptySignal)));
    }

    #[test]
    fn encoded_header_is_canonical() {
        let bytes = encode_wav(&[0.0, 0.5], 8000).unwrap();
        assert_eq!(bytes.len(), 48);
        assert_eq!(&bytes[36..40], b"data");
        let back = decode_wav(&bytes).unwrap();
        assert_eq!(back.signal.len(), 2);
    }

    proptest::proptest! {
        #[test]
        fn round_trip_within_one_step(x in proptest::collection::vec(-1.0f64..=1.0, 1..300)) {
            let back = decode_wav(&encode_wav(&x, 8000).unwrap()).unwrap();
            for (a, b) in x.iter().zip(back.signal.samples()) {
                proptest::prop_assert!((a - b).abs() <= 1.0 / 32767.0);
            }
        }

        #[test]
        fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(proptest::prelude::any::<u8>(), 0..120)) {
            let _ = decode_wav(&bytes);
        }
    }
}
