//! Binary file formats: RIFF/WAVE PCM16, PGM (P5) / PPM (P6), and raw
//! occupancy grids.
//!
//! The occupancy format is three little-endian `u32` axis lengths followed by
//! one byte (0 or 1) per voxel, last axis fastest.

use std::fs;
use std::path::Path;

use inr_core::data::{make_grid, OccupancyGrid, SamplingInfo, SignalDataset};
use inr_core::Matrix;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("byte {offset}: {field}: {detail}")]
    Malformed {
        offset: usize,
        field: &'static str,
        detail: String,
    },
    #[error("{0}")]
    Invalid(String),
}

fn malformed(offset: usize, field: &'static str, detail: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        offset,
        field,
        detail: detail.into(),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, FormatError> {
    fs::read(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    fs::write(path, bytes).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn u16_at(b: &[u8], at: usize, field: &'static str) -> Result<u16, FormatError> {
    b.get(at..at + 2)
        .map(|s| u16::from_le_bytes([s[0], s[1]]))
        .ok_or_else(|| malformed(at, field, "truncated"))
}

fn u32_at(b: &[u8], at: usize, field: &'static str) -> Result<u32, FormatError> {
    b.get(at..at + 4)
        .map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or_else(|| malformed(at, field, "truncated"))
}

/// Decoded PCM16 audio, first channel only.
#[derive(Clone, Debug, PartialEq)]
pub struct Wav {
    pub sample_rate: u32,
    pub samples: Vec<i16>,
}

impl Wav {
    /// Samples scaled by `1/32768`.
    pub fn to_dataset(&self) -> Result<SignalDataset, FormatError> {
        let n = self.samples.len();
        let coords = make_grid(&[n]).map_err(|e| FormatError::Invalid(format!("audio with {n} samples: {e}")))?;
        Ok(SignalDataset {
            coords,
            targets: Matrix::column(self.samples.iter().map(|&s| s as f64 / 32768.0).collect()),
            sampling: SamplingInfo::audio(n, self.sample_rate as f64),
            value_range: (-1.0, 1.0),
        })
    }

    /// Inverse of [`Wav::to_dataset`]; values are clamped to the PCM16 range.
    pub fn from_values(values: &[f64], sample_rate: u32) -> Self {
        let samples = values
            .iter()
            .map(|v| (v * 32768.0).round().clamp(-32768.0, 32767.0) as i16)
            .collect();
        Self { sample_rate, samples }
    }
}

pub fn parse_wav(bytes: &[u8]) -> Result<Wav, FormatError> {
    if bytes.get(0..4) != Some(b"RIFF") {
        return Err(malformed(0, "riff_id", "expected \"RIFF\""));
    }
    if bytes.get(8..12) != Some(b"WAVE") {
        return Err(malformed(8, "wave_id", "expected \"WAVE\""));
    }
    let mut at = 12;
    let mut format: Option<(u16, u32, u16)> = None;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = u32_at(bytes, at + 4, "chunk_size")? as usize;
        let body = at + 8;
        if id == b"fmt " {
            let audio_format = u16_at(bytes, body, "audio_format")?;
            if audio_format != 1 {
                return Err(malformed(
                    body,
                    "audio_format",
                    format!("{audio_format} is not PCM (1)"),
                ));
            }
            let channels = u16_at(bytes, body + 2, "num_channels")?;
            if channels == 0 {
                return Err(malformed(body + 2, "num_channels", "zero channels"));
            }
            let rate = u32_at(bytes, body + 4, "sample_rate")?;
            if rate == 0 {
                return Err(malformed(body + 4, "sample_rate", "zero sample rate"));
            }
            let bits = u16_at(bytes, body + 14, "bits_per_sample")?;
            if bits != 16 {
                return Err(malformed(
                    body + 14,
                    "bits_per_sample",
                    format!("{bits}-bit samples, only 16 supported"),
                ));
            }
            format = Some((channels, rate, bits));
        } else if id == b"data" {
            let (channels, rate, _) = format.ok_or_else(|| malformed(at, "data", "data chunk before fmt chunk"))?;
            let data = bytes
                .get(body..body + size)
                .ok_or_else(|| malformed(body, "data", format!("declares {size} bytes, file is shorter")))?;
            let frame = 2 * channels as usize;
            let samples = data
                .chunks_exact(frame)
                .map(|f| i16::from_le_bytes([f[0], f[1]]))
                .collect();
            return Ok(Wav {
                sample_rate: rate,
                samples,
            });
        }
        at = body + size + (size & 1);
    }
    Err(malformed(at, "data", "no data chunk"))
}

/// Mono PCM16 RIFF/WAVE bytes.
pub fn encode_wav(wav: &Wav) -> Vec<u8> {
    let data_len = 2 * wav.samples.len() as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&wav.sample_rate.to_le_bytes());
    out.extend_from_slice(&(2 * wav.sample_rate).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in &wav.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn load_wav(path: &Path) -> Result<SignalDataset, FormatError> {
    parse_wav(&read_file(path)?)?.to_dataset()
}

pub fn save_wav(path: &Path, values: &[f64], sample_rate: u32) -> Result<(), FormatError> {
    write_file(path, &encode_wav(&Wav::from_values(values, sample_rate)))
}

/// An 8-bit grayscale or RGB raster, values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// `(height·width) × channels`, row-major pixels.
    pub values: Matrix,
}

impl Image {
    pub fn channels(&self) -> usize {
        self.values.cols()
    }

    pub fn to_dataset(&self) -> Result<SignalDataset, FormatError> {
        let coords = make_grid(&[self.height, self.width])
            .map_err(|e| FormatError::Invalid(format!("{}x{} image: {e}", self.width, self.height)))?;
        Ok(SignalDataset {
            coords,
            targets: self.values.clone(),
            sampling: SamplingInfo::grid(vec![self.height, self.width]),
            value_range: (0.0, 1.0),
        })
    }

    /// Rebuilds an image from grid values shaped by `sampling`.
    pub fn from_values(values: Matrix, sampling: &SamplingInfo) -> Result<Self, FormatError> {
        let [height, width] = sampling.sample_counts[..] else {
            return Err(FormatError::Invalid(format!(
                "image needs 2 sample counts, got {:?}",
                sampling.sample_counts
            )));
        };
        if values.rows() != height * width || !matches!(values.cols(), 1 | 3) {
            return Err(FormatError::Invalid(format!(
                "{}x{} values do not form a {width}x{height} gray or RGB image",
                values.rows(),
                values.cols()
            )));
        }
        Ok(Self { width, height, values })
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl HeaderCursor<'_> {
    fn skip_space(&mut self) {
        loop {
            match self.bytes.get(self.at) {
                Some(b) if b.is_ascii_whitespace() => self.at += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.at) {
                        self.at += 1;
                        if b == b'\n' || b == b'\r' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, field: &'static str) -> Result<usize, FormatError> {
        self.skip_space();
        let start = self.at;
        while self.bytes.get(self.at).is_some_and(u8::is_ascii_digit) {
            self.at += 1;
        }
        if start == self.at {
            return Err(malformed(start, field, "expected a decimal number"));
        }
        std::str::from_utf8(&self.bytes[start..self.at])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(start, field, "number out of range"))
    }
}

pub fn parse_pnm(bytes: &[u8]) -> Result<Image, FormatError> {
    let channels = match bytes.get(0..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(malformed(0, "magic", "expected P5 or P6")),
    };
    let mut cur = HeaderCursor { bytes, at: 2 };
    let width_at = cur.at;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval_at = cur.at;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(malformed(width_at, "width", format!("empty {width}x{height} image")));
    }
    if maxval != 255 {
        return Err(malformed(maxval_at, "maxval", format!("{maxval}, only 255 supported")));
    }
    match bytes.get(cur.at) {
        Some(b) if b.is_ascii_whitespace() => cur.at += 1,
        _ => return Err(malformed(cur.at, "maxval", "missing whitespace before raster")),
    }
    let len = width * height * channels;
    let raster = bytes.get(cur.at..cur.at + len).ok_or_else(|| {
        malformed(
            cur.at,
            "raster",
            format!("expected {len} bytes, found {}", bytes.len() - cur.at),
        )
    })?;
    let values = Matrix::new(
        width * height,
        channels,
        raster.iter().map(|&b| b as f64 / 255.0).collect(),
    )
    .map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok(Image { width, height, values })
}

/// Binary PGM for one channel, PPM for three; `round(v·255)` with halves
/// rounded up, clamped to 0..=255.
pub fn encode_pnm(image: &Image) -> Result<Vec<u8>, FormatError> {
    let magic = match image.channels() {
        1 => "P5",
        3 => "P6",
        c => return Err(FormatError::Invalid(format!("{c} channels, need 1 or 3"))),
    };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(
        image
            .values
            .data()
            .iter()
            .map(|v| (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8),
    );
    Ok(out)
}

pub fn load_image(path: &Path) -> Result<SignalDataset, FormatError> {
    parse_pnm(&read_file(path)?)?.to_dataset()
}

pub fn save_image(path: &Path, image: &Image) -> Result<(), FormatError> {
    write_file(path, &encode_pnm(image)?)
}

pub fn parse_occupancy(bytes: &[u8]) -> Result<OccupancyGrid, FormatError> {
    let mut resolution = [0usize; 3];
    for (i, r) in resolution.iter_mut().enumerate() {
        *r = u32_at(bytes, 4 * i, "resolution")? as usize;
    }
    let n: usize = resolution.iter().product();
    let body = &bytes[12..];
    if body.len() != n {
        return Err(malformed(
            12,
            "voxels",
            format!("expected {n} bytes, found {}", body.len()),
        ));
    }
    if let Some(pos) = body.iter().position(|&v| v > 1) {
        return Err(malformed(
            12 + pos,
            "voxels",
            format!("value {} is not 0 or 1", body[pos]),
        ));
    }
    OccupancyGrid::new(resolution, body.to_vec()).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn encode_occupancy(grid: &OccupancyGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + grid.values.len());
    for r in grid.resolution {
        out.extend_from_slice(&(r as u32).to_le_bytes());
    }
    out.extend_from_slice(&grid.values);
    out
}

pub fn load_occupancy(path: &Path) -> Result<OccupancyGrid, FormatError> {
    parse_occupancy(&read_file(path)?)
}

pub fn save_occupancy(path: &Path, grid: &OccupancyGrid) -> Result<(), FormatError> {
    write_file(path, &encode_occupancy(grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use inr_core::classical::nyquist_frequency;

    #[test]
    fn silent_second() {
        let wav = Wav {
            sample_rate: 4000,
            samples: vec![0; 4000],
        };
        let ds = parse_wav(&encode_wav(&wav)).unwrap().to_dataset().unwrap();
        assert_eq!(ds.len(), 4000);
        assert!(ds.targets.data().iter().all(|&v| v == 0.0));
        assert_eq!(nyquist_frequency(&ds.sampling), 2000.0);
    }

    #[test]
    fn wav_rejects_non_pcm() {
        let mut bytes = encode_wav(&Wav {
            sample_rate: 8000,
            samples: vec![1, 2, 3],
        });
        bytes[20] = 3;
        let err = parse_wav(&bytes).unwrap_err();
        assert!(err.to_string().contains("audio_format"), "{err}");
        let mut bytes = encode_wav(&Wav {
            sample_rate: 8000,
            samples: vec![1],
        });
        bytes[34] = 8;
        assert!(parse_wav(&bytes).unwrap_err().to_string().contains("bits_per_sample"));
        assert!(parse_wav(b"RIFX").unwrap_err().to_string().contains("riff_id"));
    }

    #[test]
    fn wav_takes_first_channel_and_skips_unknown_chunks() {
        let mut bytes = b"RIFF\0\0\0\0WAVE".to_vec();
        bytes.extend_from_slice(b"LIST\x03\0\0\0abc\0");
        bytes.extend_from_slice(b"fmt \x10\0\0\0");
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&2u16.to_le_bytes());
        bytes.extend_from_slice(&16000u32.to_le_bytes());
        bytes.extend_from_slice(&64000u32.to_le_bytes());
        bytes.extend_from_slice(&4u16.to_le_bytes());
        bytes.extend_from_slice(&16u16.to_le_bytes());
        bytes.extend_from_slice(b"data\x08\0\0\0");
        for s in [5i16, -5, -7, 7] {
            bytes.extend_from_slice(&s.to_le_bytes());
        }
        let wav = parse_wav(&bytes).unwrap();
        assert_eq!(wav.sample_rate, 16000);
        assert_eq!(wav.samples, vec![5, -7]);
    }

    #[test]
    fn zero_gray_image() {
        let mut bytes = b"P5\n# comment\n4 4\n255\n".to_vec();
        bytes.extend_from_slice(&[0; 16]);
        let ds = parse_pnm(&bytes).unwrap().to_dataset().unwrap();
        assert_eq!(ds.targets.shape(), (16, 1));
        assert!(ds.targets.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pnm_errors_carry_offsets() {
        let err = parse_pnm(b"P3\n1 1\n255\n\0").unwrap_err();
        assert!(matches!(
            err,
            FormatError::Malformed {
                offset: 0,
                field: "magic",
                ..
            }
        ));
        let err = parse_pnm(b"P5\n1 1\n65535\n\0\0").unwrap_err();
        assert!(
            matches!(
                err,
                FormatError::Malformed {
                    offset: 6,
                    field: "maxval",
                    ..
                }
            ),
            "{err}"
        );
        let err = parse_pnm(b"P5\nx 1\n255\n\0").unwrap_err();
        assert!(matches!(
            err,
            FormatError::Malformed {
                offset: 3,
                field: "width",
                ..
            }
        ));
        let err = parse_pnm(b"P6\n2 1\n255\n\0\0\0").unwrap_err();
        assert!(matches!(
            err,
            FormatError::Malformed {
                offset: 11,
                field: "raster",
                ..
            }
        ));
    }

    #[test]
    fn image_nyquist() {
        let image = Image {
            width: 768,
            height: 512,
            values: Matrix::zeros(768 * 512, 1),
        };
        let ds = image.to_dataset().unwrap();
        assert_eq!(nyquist_frequency(&ds.sampling), 256.0);
    }

    #[test]
    fn save_rounds_half_up() {
        let image = Image {
            width: 3,
            height: 1,
            values: Matrix::column(vec![0.5 / 255.0, 1.5 / 255.0, 2.0]),
        };
        let bytes = encode_pnm(&image).unwrap();
        assert_eq!(&bytes[bytes.len() - 3..], &[1, 2, 255]);
    }

    #[test]
    fn occupancy_round_trip_and_errors() {
        let grid = OccupancyGrid::new([2, 3, 2], vec![0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 1, 0]).unwrap();
        assert_eq!(parse_occupancy(&encode_occupancy(&grid)).unwrap(), grid);
        let mut bad = encode_occupancy(&grid);
        bad[14] = 2;
        assert!(matches!(
            parse_occupancy(&bad),
            Err(FormatError::Malformed { offset: 14, .. })
        ));
        assert!(parse_occupancy(&bad[..20]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn image_round_trip_is_identity(w in 1usize..9, h in 1usize..9, rgb in any::<bool>(), seed in any::<u64>()) {
                let c = if rgb { 3 } else { 1 };
                let mut state = seed;
                let bytes: Vec<u8> = (0..w * h * c).map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 56) as u8
                }).collect();
                let image = Image {
                    width: w,
                    height: h,
                    values: Matrix::new(w * h, c, bytes.iter().map(|&b| b as f64 / 255.0).collect()).unwrap(),
                };
                let encoded = encode_pnm(&image).unwrap();
                let back = parse_pnm(&encoded).unwrap();
                prop_assert_eq!(&back, &image);
                prop_assert_eq!(encode_pnm(&back).unwrap(), encoded);
            }

            #[test]
            fn wav_round_trip_is_bit_exact(samples in proptest::collection::vec(any::<i16>(), 0..64), rate in 1u32..96_000) {
                let wav = Wav { sample_rate: rate, samples };
                prop_assert_eq!(parse_wav(&encode_wav(&wav)).unwrap(), wav.clone());
                let values: Vec<f64> = wav.samples.iter().map(|&s| s as f64 / 32768.0).collect();
                prop_assert_eq!(Wav::from_values(&values, rate), wav);
            }

            #[test]
            fn loaders_stay_in_range(samples in proptest::collection::vec(any::<i16>(), 2..64)) {
                let ds = Wav { sample_rate: 4000, samples }.to_dataset().unwrap();
                prop_assert!(ds.coords.data().iter().all(|v| (-1.0..=1.0).contains(v)));
                prop_assert!(ds.targets.data().iter().all(|v| v.is_finite() && (-1.0..=1.0).contains(v)));
            }
        }
    }
}
