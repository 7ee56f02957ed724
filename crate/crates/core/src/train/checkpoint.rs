//! Checkpoint format: versioned header (magic, version, dimensions, mode,
//! vocabulary hash) followed by named parameter blocks as little-endian f32.
//! Writes are atomic (temp file + rename); loading rejects a mismatched
//! vocabulary hash.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, SggError};
use crate::model::{init_params, GuiderMode, ModelDims, ModelParams};

const MAGIC: &[u8; 8] = b"SGGCKPT\x01";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointMeta {
    pub dims: ModelDims,
    pub mode: GuiderMode,
    pub vocab_hash: [u8; 32],
}

fn mode_byte(mode: GuiderMode) -> u8 {
    match mode {
        GuiderMode::Sgg => 0,
        GuiderMode::SgAblation => 1,
        GuiderMode::GuiderVariant => 2,
    }
}

fn byte_mode(b: u8) -> Result<GuiderMode> {
    match b {
        0 => Ok(GuiderMode::Sgg),
        1 => Ok(GuiderMode::SgAblation),
        2 => Ok(GuiderMode::GuiderVariant),
        other => Err(SggError::Checkpoint(format!("unknown mode byte {other}"))),
    }
}

pub fn save_checkpoint(
    path: &Path,
    params: &ModelParams<f32>,
    meta: &CheckpointMeta,
) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    for v in [
        meta.dims.vocab,
        meta.dims.embed,
        meta.dims.hidden,
        meta.dims.guider_k,
        meta.dims.max_src_len,
        meta.dims.max_tgt_len,
    ] {
        buf.extend_from_slice(&(v as u32).to_le_bytes());
    }
    buf.push(mode_byte(meta.mode));
    buf.extend_from_slice(&meta.vocab_hash);

    let blocks = params.blocks();
    buf.extend_from_slice(&(blocks.len() as u32).to_le_bytes());
    for (name, b) in blocks {
        buf.extend_from_slice(&(name.len() as u16).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&(b.rows as u32).to_le_bytes());
        buf.extend_from_slice(&(b.cols as u32).to_le_bytes());
        for &x in &b.data {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }

    let parent = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(parent).map_err(|e| SggError::io(parent, e))?;
    let tmp = path.with_extension("tmp");
    let mut file = std::fs::File::create(&tmp).map_err(|e| SggError::io(&tmp, e))?;
    file.write_all(&buf).map_err(|e| SggError::io(&tmp, e))?;
    file.sync_all().map_err(|e| SggError::io(&tmp, e))?;
    drop(file);
    std::fs::rename(&tmp, path).map_err(|e| SggError::io(path, e))?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(SggError::Checkpoint("truncated checkpoint".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
}

/// Load a checkpoint, verifying the vocabulary hash when one is supplied.
pub fn load_checkpoint(
    path: &Path,
    expected_vocab_hash: Option<&[u8; 32]>,
) -> Result<(CheckpointMeta, ModelParams<f32>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| SggError::io(path, e))?;
    let mut r = Reader {
        buf: &bytes,
        pos: 0,
    };
    if r.take(8)? != MAGIC {
        return Err(SggError::Checkpoint(format!(
            "{} is not a checkpoint (bad magic)",
            path.display()
        )));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(SggError::Checkpoint(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let dims = ModelDims {
        vocab: r.u32()? as usize,
        embed: r.u32()? as usize,
        hidden: r.u32()? as usize,
        guider_k: r.u32()? as usize,
        max_src_len: r.u32()? as usize,
        max_tgt_len: r.u32()? as usize,
    };
    let mode = byte_mode(r.u8()?)?;
    let vocab_hash: [u8; 32] = r.take(32)?.try_into().unwrap();
    if let Some(expected) = expected_vocab_hash {
        if &vocab_hash != expected {
            return Err(SggError::Checkpoint(
                "checkpoint was trained against a different vocabulary".into(),
            ));
        }
    }

    let mut params: ModelParams<f32> = init_params(&dims, 0);
    let block_count = r.u32()? as usize;
    let expected_blocks = params.blocks().len();
    if block_count != expected_blocks {
        return Err(SggError::Checkpoint(format!(
            "checkpoint has {block_count} blocks, expected {expected_blocks}"
        )));
    }
    for (name, block) in params.blocks_mut() {
        let name_len = r.u16()? as usize;
        let got_name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| SggError::Checkpoint("invalid block name".into()))?;
        if got_name != name {
            return Err(SggError::Checkpoint(format!(
                "unexpected block {got_name:?} (wanted {name:?})"
            )));
        }
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        if rows != block.rows || cols != block.cols {
            return Err(SggError::Checkpoint(format!(
                "block {name}: shape [{rows}, {cols}] does not match [{}, {}]",
                block.rows, block.cols
            )));
        }
        for x in block.data.iter_mut() {
            *x = f32::from_le_bytes(r.take(4)?.try_into().unwrap());
        }
    }
    if r.pos != bytes.len() {
        return Err(SggError::Checkpoint("trailing bytes in checkpoint".into()));
    }
    Ok((
        CheckpointMeta {
            dims,
            mode,
            vocab_hash,
        },
        params,
    ))
}
