//! Uncompressed AVI: 24-bit BI_RGB video plus optional 16-bit mono PCM.
//!
//! Layout written (and the subset accepted on read):
//!
//! ```text
//! RIFF 'AVI '
//!   LIST 'hdrl'
//!     'avih'
//!     LIST 'strl' { 'strh' vids, 'strf' BITMAPINFOHEADER }
//!     LIST 'strl' { 'strh' auds, 'strf' WAVEFORMATEX }      (optional)
//!   LIST 'movi' { '00db' frame, '01wb' audio, ... }
//!   'idx1'                                                  (ignored on read)
//! ```

use super::reader::Reader;
use super::{AudioTrack, ContainerError, FourCc, Fps, FramePlanes, VideoAsset};

const RIFF: FourCc = FourCc::new(b"RIFF");
const AVI: FourCc = FourCc::new(b"AVI ");
const LIST: FourCc = FourCc::new(b"LIST");
const HDRL: FourCc = FourCc::new(b"hdrl");
const AVIH: FourCc = FourCc::new(b"avih");
const STRL: FourCc = FourCc::new(b"strl");
const STRH: FourCc = FourCc::new(b"strh");
const STRF: FourCc = FourCc::new(b"strf");
const MOVI: FourCc = FourCc::new(b"movi");
const REC: FourCc = FourCc::new(b"rec ");
const IDX1: FourCc = FourCc::new(b"idx1");
const VIDS: FourCc = FourCc::new(b"vids");
const AUDS: FourCc = FourCc::new(b"auds");
const DIB: FourCc = FourCc::new(b"DIB ");
const VIDEO_CHUNK: FourCc = FourCc::new(b"00db");
const AUDIO_CHUNK: FourCc = FourCc::new(b"01wb");

const AVIF_HASINDEX: u32 = 0x10;
const AVIIF_KEYFRAME: u32 = 0x10;
const WAVE_FORMAT_PCM: u16 = 1;
const MAX_LIST_DEPTH: usize = 8;

/// Bytes per DIB row: 3 bytes per pixel, padded to a multiple of 4.
pub(crate) fn dib_stride(width: u32) -> usize {
    (width as usize * 3 + 3) & !3
}

#[derive(Debug, Clone, Copy)]
struct VideoStream {
    width: u32,
    height: u32,
    top_down: bool,
    fps: Fps,
}

#[derive(Debug, Clone, Copy)]
enum Stream {
    Video(VideoStream),
    Audio { sample_rate: u32 },
    Other,
}

struct Chunk<'a> {
    id: FourCc,
    offset: u64,
    body: Reader<'a>,
}

fn next_chunk<'a>(r: &mut Reader<'a>) -> Result<Chunk<'a>, ContainerError> {
    let offset = r.offset();
    if r.remaining() < 8 {
        return Err(r.truncated(8));
    }
    let id = r.fourcc()?;
    let size = r.u32()? as usize;
    let body = r.sub(size, id).map_err(|_| ContainerError::Truncated {
        offset,
        fourcc: id,
        needed: size as u64 + 8,
        available: r.remaining() as u64 + 8,
    })?;
    // Word alignment; a missing pad byte at the very end is tolerated.
    if size % 2 == 1 && !r.is_empty() {
        r.skip(1)?;
    }
    Ok(Chunk { id, offset, body })
}

fn malformed(offset: u64, fourcc: FourCc, reason: impl Into<String>) -> ContainerError {
    ContainerError::Malformed { offset, fourcc, reason: reason.into() }
}

fn unsupported(offset: u64, fourcc: FourCc, what: impl Into<String>) -> ContainerError {
    ContainerError::Unsupported { offset, fourcc, what: what.into() }
}

pub fn parse_avi(bytes: &[u8]) -> Result<VideoAsset, ContainerError> {
    let mut file = Reader::new(bytes, 0, RIFF);
    if bytes.len() < 12 {
        return Err(file.truncated(12));
    }
    let riff = next_chunk(&mut file).map_err(|e| match e {
        ContainerError::Truncated { .. } if &bytes[..4] != b"RIFF" => ContainerError::BadMagic {
            offset: 0,
            expected: RIFF,
            found: FourCc([bytes[0], bytes[1], bytes[2], bytes[3]]),
        },
        e => e,
    })?;
    if riff.id != RIFF {
        return Err(ContainerError::BadMagic { offset: 0, expected: RIFF, found: riff.id });
    }
    let mut body = riff.body;
    let form = body.fourcc()?;
    if form != AVI {
        return Err(ContainerError::BadMagic { offset: 8, expected: AVI, found: form });
    }

    let mut streams: Option<Vec<Stream>> = None;
    let mut movi = None;
    while !body.is_empty() {
        let mut chunk = next_chunk(&mut body)?;
        if chunk.id != LIST {
            continue;
        }
        let list_type = chunk.body.fourcc()?;
        match list_type {
            HDRL if streams.is_none() => streams = Some(parse_hdrl(chunk.body)?),
            MOVI if movi.is_none() => {
                let streams =
                    streams.as_deref().ok_or_else(|| malformed(chunk.offset, MOVI, "'movi' precedes 'hdrl'"))?;
                movi = Some(parse_movi(chunk.body, streams)?);
            }
            _ => {}
        }
    }

    let streams = streams.ok_or_else(|| malformed(12, HDRL, "missing header list"))?;
    let (fps, frames, audio) = movi.ok_or_else(|| malformed(12, MOVI, "missing movie list"))?;
    let has_audio = streams.iter().any(|s| matches!(s, Stream::Audio { .. }));
    let audio = if has_audio { audio } else { None };
    VideoAsset::new(fps, frames, audio)
}

fn parse_hdrl(mut list: Reader<'_>) -> Result<Vec<Stream>, ContainerError> {
    let mut seen_avih = false;
    let mut streams = Vec::new();
    while !list.is_empty() {
        let mut chunk = next_chunk(&mut list)?;
        match chunk.id {
            AVIH => {
                if chunk.body.remaining() < 40 {
                    return Err(chunk.body.truncated(40));
                }
                seen_avih = true;
            }
            LIST if chunk.body.fourcc()? == STRL => {
                streams.push(parse_strl(chunk.body, chunk.offset)?);
            }
            _ => {}
        }
    }
    if !seen_avih {
        return Err(malformed(list.offset(), AVIH, "missing main header"));
    }
    if !streams.iter().any(|s| matches!(s, Stream::Video(_))) {
        return Err(malformed(list.offset(), STRL, "no video stream"));
    }
    Ok(streams)
}

fn parse_strl(mut list: Reader<'_>, offset: u64) -> Result<Stream, ContainerError> {
    let mut header = None;
    let mut format = None;
    while !list.is_empty() {
        let chunk = next_chunk(&mut list)?;
        match chunk.id {
            STRH if header.is_none() => header = Some(chunk),
            STRF if format.is_none() => format = Some(chunk),
            _ => {}
        }
    }
    let mut strh = header.ok_or_else(|| malformed(offset, STRH, "stream list without header"))?;
    if strh.body.remaining() < 48 {
        return Err(strh.body.truncated(48));
    }
    let kind = strh.body.fourcc()?;
    strh.body.skip(4 + 4 + 2 + 2 + 4)?; // handler, flags, priority, language, initial frames
    let scale = strh.body.u32()?;
    let rate = strh.body.u32()?;

    match kind {
        VIDS => {
            let mut strf = format.ok_or_else(|| malformed(offset, STRF, "video stream without format"))?;
            if strf.body.remaining() < 40 {
                return Err(strf.body.truncated(40));
            }
            let _size = strf.body.u32()?;
            let width = strf.body.i32()?;
            let height = strf.body.i32()?;
            let _planes = strf.body.u16()?;
            let bit_count = strf.body.u16()?;
            let compression = strf.body.u32()?;
            if compression != 0 {
                let codec = FourCc(compression.to_le_bytes());
                return Err(unsupported(strf.offset, STRF, format!("video codec {codec}")));
            }
            if bit_count != 24 {
                return Err(unsupported(strf.offset, STRF, format!("bit depth {bit_count}")));
            }
            if width <= 0 || height == 0 || height == i32::MIN {
                return Err(malformed(strf.offset, STRF, format!("frame size {width}x{height}")));
            }
            if scale == 0 || rate == 0 {
                return Err(malformed(strh.offset, STRH, format!("frame rate {rate}/{scale}")));
            }
            Ok(Stream::Video(VideoStream {
                width: width as u32,
                height: height.unsigned_abs(),
                top_down: height < 0,
                fps: Fps::new(rate, scale),
            }))
        }
        AUDS => {
            let mut strf = format.ok_or_else(|| malformed(offset, STRF, "audio stream without format"))?;
            if strf.body.remaining() < 16 {
                return Err(strf.body.truncated(16));
            }
            let tag = strf.body.u16()?;
            let channels = strf.body.u16()?;
            let sample_rate = strf.body.u32()?;
            let _byte_rate = strf.body.u32()?;
            let _block_align = strf.body.u16()?;
            let bits = strf.body.u16()?;
            if tag != WAVE_FORMAT_PCM {
                return Err(unsupported(strf.offset, STRF, format!("non-PCM audio (format tag {tag:#06x})")));
            }
            if channels != 1 {
                return Err(unsupported(strf.offset, STRF, format!("{channels}-channel audio")));
            }
            if bits != 16 {
                return Err(unsupported(strf.offset, STRF, format!("{bits}-bit audio")));
            }
            if sample_rate == 0 {
                return Err(malformed(strf.offset, STRF, "zero sample rate"));
            }
            Ok(Stream::Audio { sample_rate })
        }
        _ => Ok(Stream::Other),
    }
}

/// Stream index and two-letter type of a movie chunk id such as `00db`.
fn chunk_stream(id: FourCc) -> Option<(usize, [u8; 2])> {
    let [a, b, c, d] = id.0;
    if a.is_ascii_digit() && b.is_ascii_digit() {
        Some((((a - b'0') * 10 + (b - b'0')) as usize, [c, d]))
    } else {
        None
    }
}

type MovieData = (Fps, Vec<FramePlanes>, Option<AudioTrack>);

fn parse_movi(list: Reader<'_>, streams: &[Stream]) -> Result<MovieData, ContainerError> {
    let (video_index, video) = streams
        .iter()
        .enumerate()
        .find_map(|(i, s)| match s {
            Stream::Video(v) => Some((i, *v)),
            _ => None,
        })
        .expect("hdrl guarantees a video stream");
    let audio_stream = streams.iter().enumerate().find_map(|(i, s)| match s {
        Stream::Audio { sample_rate } => Some((i, *sample_rate)),
        _ => None,
    });

    let frame_len = dib_stride(video.width)
        .checked_mul(video.height as usize)
        .ok_or_else(|| malformed(0, STRF, "frame size overflows"))?;

    let mut frames = Vec::new();
    let mut samples = Vec::new();
    let mut pending = vec![list];
    while let Some(mut list) = pending.pop() {
        while !list.is_empty() {
            let mut chunk = next_chunk(&mut list)?;
            if chunk.id == LIST {
                if chunk.body.fourcc()? == REC {
                    if pending.len() + 1 >= MAX_LIST_DEPTH {
                        return Err(malformed(chunk.offset, REC, "lists nested too deeply"));
                    }
                    // Finish the nested list before resuming this one.
                    pending.push(list);
                    pending.push(chunk.body);
                    break;
                }
                continue;
            }
            let Some((index, kind)) = chunk_stream(chunk.id) else {
                continue;
            };
            if index == video_index && (&kind == b"db" || &kind == b"dc") {
                let data = chunk.body.bytes(chunk.body.remaining())?;
                if data.len() != frame_len {
                    return Err(malformed(
                        chunk.offset,
                        chunk.id,
                        format!("frame payload is {} bytes, expected {frame_len}", data.len()),
                    ));
                }
                frames.push(decode_dib(data, video));
            } else if audio_stream.is_some_and(|(i, _)| i == index) && &kind == b"wb" {
                let data = chunk.body.bytes(chunk.body.remaining())?;
                if data.len() % 2 != 0 {
                    return Err(malformed(chunk.offset, chunk.id, "odd-length 16-bit PCM payload"));
                }
                samples.extend(data.chunks_exact(2).map(|s| i16::from_le_bytes([s[0], s[1]])));
            }
        }
    }
    if frames.is_empty() {
        return Err(ContainerError::NoFrames);
    }
    let audio = audio_stream.map(|(_, rate)| AudioTrack::new(samples, rate));
    Ok((video.fps, frames, audio))
}

fn decode_dib(data: &[u8], video: VideoStream) -> FramePlanes {
    let (w, h) = (video.width as usize, video.height as usize);
    let stride = dib_stride(video.width);
    let mut frame = FramePlanes::solid(video.width, video.height, [0; 3]);
    for y in 0..h {
        let src_row = if video.top_down { y } else { h - 1 - y };
        let row = &data[src_row * stride..src_row * stride + w * 3];
        for (x, bgr) in row.chunks_exact(3).enumerate() {
            let i = y * w + x;
            frame.b[i] = bgr[0];
            frame.g[i] = bgr[1];
            frame.r[i] = bgr[2];
        }
    }
    frame
}

fn encode_dib(frame: &FramePlanes, out: &mut Vec<u8>) {
    let (w, h) = (frame.width() as usize, frame.height() as usize);
    let stride = dib_stride(frame.width());
    for y in (0..h).rev() {
        let start = out.len();
        for x in 0..w {
            let i = y * w + x;
            out.extend_from_slice(&[frame.b[i], frame.g[i], frame.r[i]]);
        }
        out.resize(start + stride, 0);
    }
}

struct RiffWriter {
    buf: Vec<u8>,
    open: Vec<usize>,
}

impl RiffWriter {
    fn new() -> Self {
        Self { buf: Vec::new(), open: Vec::new() }
    }

    fn fourcc(&mut self, id: FourCc) {
        self.buf.extend_from_slice(&id.0);
    }

    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn i32(&mut self, v: i32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    /// Opens a chunk (or a RIFF/LIST with `form`); sizes are patched on close.
    fn begin(&mut self, id: FourCc, form: Option<FourCc>) {
        self.fourcc(id);
        self.open.push(self.buf.len());
        self.u32(0);
        if let Some(form) = form {
            self.fourcc(form);
        }
    }

    fn end(&mut self) -> Result<(), ContainerError> {
        let at = self.open.pop().expect("unbalanced chunk");
        let size = self.buf.len() - at - 4;
        let size =
            u32::try_from(size).map_err(|_| ContainerError::InvalidAsset("AVI exceeds the 4 GiB RIFF limit".into()))?;
        self.buf[at..at + 4].copy_from_slice(&size.to_le_bytes());
        if size % 2 == 1 {
            self.buf.push(0);
        }
        Ok(())
    }

    fn chunk(&mut self, id: FourCc, payload: &[u8]) -> Result<(), ContainerError> {
        self.begin(id, None);
        self.buf.extend_from_slice(payload);
        self.end()
    }
}

/// Serialises an asset as uncompressed AVI with a trailing `idx1`.
pub fn write_avi(asset: &VideoAsset) -> Result<Vec<u8>, ContainerError> {
    let frames = asset.frames();
    if frames.is_empty() {
        return Err(ContainerError::NoFrames);
    }
    if asset.width() > i32::MAX as u32 || asset.height() > i32::MAX as u32 {
        return Err(ContainerError::InvalidAsset("frame dimensions exceed 2^31".into()));
    }
    let frame_count =
        u32::try_from(frames.len()).map_err(|_| ContainerError::InvalidAsset("too many frames".into()))?;
    let fps = asset.fps();
    let frame_len = dib_stride(asset.width()) * asset.height() as usize;
    let frame_len_u32 = u32::try_from(frame_len).map_err(|_| ContainerError::InvalidAsset("frame too large".into()))?;
    let audio = asset.audio();
    let stream_count = if audio.is_some() { 2 } else { 1 };
    let micros_per_frame = (1_000_000u64 * fps.den as u64 / fps.num as u64) as u32;

    let mut w = RiffWriter::new();
    w.begin(RIFF, Some(AVI));

    w.begin(LIST, Some(HDRL));
    w.begin(AVIH, None);
    w.u32(micros_per_frame);
    w.u32(frame_len_u32.saturating_mul(fps.num.div_ceil(fps.den)));
    w.u32(0); // padding granularity
    w.u32(AVIF_HASINDEX);
    w.u32(frame_count);
    w.u32(0); // initial frames
    w.u32(stream_count);
    w.u32(frame_len_u32);
    w.u32(asset.width());
    w.u32(asset.height());
    for _ in 0..4 {
        w.u32(0);
    }
    w.end()?;

    w.begin(LIST, Some(STRL));
    w.begin(STRH, None);
    w.fourcc(VIDS);
    w.fourcc(DIB);
    w.u32(0); // flags
    w.u16(0); // priority
    w.u16(0); // language
    w.u32(0); // initial frames
    w.u32(fps.den);
    w.u32(fps.num);
    w.u32(0); // start
    w.u32(frame_count);
    w.u32(frame_len_u32);
    w.u32(u32::MAX); // quality: default
    w.u32(0); // sample size
    w.u16(0);
    w.u16(0);
    w.u16(asset.width() as u16);
    w.u16(asset.height() as u16);
    w.end()?;
    w.begin(STRF, None);
    w.u32(40);
    w.i32(asset.width() as i32);
    w.i32(asset.height() as i32); // positive: bottom-up rows
    w.u16(1);
    w.u16(24);
    w.u32(0); // BI_RGB
    w.u32(frame_len_u32);
    for _ in 0..4 {
        w.u32(0);
    }
    w.end()?;
    w.end()?;

    if let Some(track) = audio {
        let sample_count = u32::try_from(track.samples.len())
            .map_err(|_| ContainerError::InvalidAsset("too many audio samples".into()))?;
        w.begin(LIST, Some(STRL));
        w.begin(STRH, None);
        w.fourcc(AUDS);
        w.u32(0); // handler
        w.u32(0);
        w.u16(0);
        w.u16(0);
        w.u32(0);
        w.u32(2); // scale = block align
        w.u32(track.sample_rate.saturating_mul(2)); // rate = bytes per second
        w.u32(0);
        w.u32(sample_count);
        w.u32(track.sample_rate.saturating_mul(2));
        w.u32(u32::MAX);
        w.u32(2); // sample size
        for _ in 0..4 {
            w.u16(0);
        }
        w.end()?;
        w.begin(STRF, None);
        w.u16(WAVE_FORMAT_PCM);
        w.u16(1);
        w.u32(track.sample_rate);
        w.u32(track.sample_rate.saturating_mul(2));
        w.u16(2);
        w.u16(16);
        w.u16(0); // cbSize
        w.end()?;
        w.end()?;
    }
    w.end()?; // hdrl

    let mut index: Vec<(FourCc, u32, u32, u32)> = Vec::new();
    w.begin(LIST, Some(MOVI));
    let movi_base = w.buf.len() - 4;
    let mut payload = Vec::with_capacity(frame_len);
    let total_samples = audio.map_or(0, |t| t.samples.len());
    for (i, frame) in frames.iter().enumerate() {
        payload.clear();
        encode_dib(frame, &mut payload);
        index.push((VIDEO_CHUNK, AVIIF_KEYFRAME, (w.buf.len() - movi_base) as u32, frame_len_u32));
        w.chunk(VIDEO_CHUNK, &payload)?;
        if let Some(track) = audio {
            let lo = i * total_samples / frames.len();
            let hi = (i + 1) * total_samples / frames.len();
            if hi > lo {
                payload.clear();
                payload.extend(track.samples[lo..hi].iter().flat_map(|s| s.to_le_bytes()));
                index.push((AUDIO_CHUNK, AVIIF_KEYFRAME, (w.buf.len() - movi_base) as u32, payload.len() as u32));
                w.chunk(AUDIO_CHUNK, &payload)?;
            }
        }
    }
    w.end()?;

    w.begin(IDX1, None);
    for (id, flags, offset, size) in index {
        w.fourcc(id);
        w.u32(flags);
        w.u32(offset);
        w.u32(size);
    }
    w.end()?;

    w.end()?; // RIFF
    Ok(w.buf)
}
