//! Descriptor files.
//!
//! Little-endian layout: magic `PDSC`, record count (u32), then per record
//! format version (u16), method id (u8), block size (u16), bins per block
//! (u32), block count (u32), identity length (u16) and UTF-8 bytes, and
//! finally `blocks × bins` counts (u32 each).

use std::io::Write;
use std::path::Path;

use crate::descriptor::{Descriptor, Method};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PDSC";
pub const FORMAT_VERSION: u16 = 1;

/// A descriptor labelled with the sample it came from (`<palm>_<sample>`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptorRecord {
    pub identity: String,
    pub descriptor: Descriptor,
}

impl DescriptorRecord {
    pub fn new(identity: impl Into<String>, descriptor: Descriptor) -> Self {
        Self {
            identity: identity.into(),
            descriptor,
        }
    }

    /// Palm part of the identity: everything before the last underscore, or
    /// the whole identity when there is none.
    pub fn palm_id(&self) -> &str {
        match self.identity.rsplit_once('_') {
            Some((palm, _)) if !palm.is_empty() => palm,
            _ => &self.identity,
        }
    }
}

pub fn encode_records(records: &[DescriptorRecord]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    let count = u32::try_from(records.len()).map_err(|_| Error::input("too many records"))?;
    out.extend(count.to_le_bytes());
    for r in records {
        let d = &r.descriptor;
        let block_size = u16::try_from(d.block_size())
            .map_err(|_| Error::input(format!("block size {} does not fit u16", d.block_size())))?;
        let bins = u32::try_from(d.bins_per_block()).map_err(|_| Error::input("bins overflow u32"))?;
        let blocks = u32::try_from(d.n_blocks()).map_err(|_| Error::input("blocks overflow u32"))?;
        let id_len = u16::try_from(r.identity.len())
            .map_err(|_| Error::input(format!("identity {:?} longer than 65535 bytes", r.identity)))?;
        out.extend(FORMAT_VERSION.to_le_bytes());
        out.push(d.method().id());
        out.extend(block_size.to_le_bytes());
        out.extend(bins.to_le_bytes());
        out.extend(blocks.to_le_bytes());
        out.extend(id_len.to_le_bytes());
        out.extend_from_slice(r.identity.as_bytes());
        out.reserve(4 * d.len());
        for &c in d.counts() {
            out.extend(c.to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::format(
                self.pos,
                format!("truncated {what}: need {n} bytes, {} left", self.bytes.len() - self.pos),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn decode_records(bytes: &[u8]) -> Result<Vec<DescriptorRecord>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::format(0, "not a descriptor file (bad magic)"));
    }
    let count = r.u32("record count")?;
    let mut records = Vec::with_capacity(count.min(1 << 16) as usize);
    for _ in 0..count {
        let start = r.pos;
        let version = r.u16("version")?;
        if version != FORMAT_VERSION {
            return Err(Error::format(start, format!("unsupported format version {version}")));
        }
        let method_at = r.pos;
        let method_id = r.u8("method id")?;
        let method = Method::from_id(method_id)
            .ok_or_else(|| Error::format(method_at, format!("unknown method id {method_id}")))?;
        let block_size = r.u16("block size")? as usize;
        let bins = r.u32("bins per block")? as usize;
        let blocks = r.u32("block count")? as usize;
        let id_len = r.u16("identity length")? as usize;
        let id_at = r.pos;
        let identity = std::str::from_utf8(r.take(id_len, "identity")?)
            .map_err(|_| Error::format(id_at, "identity is not UTF-8"))?
            .to_string();
        let n = blocks
            .checked_mul(bins)
            .ok_or_else(|| Error::format(start, "descriptor size overflows"))?;
        let raw = r.take(n.saturating_mul(4), "counts")?;
        let counts = raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let descriptor = Descriptor::new(method, block_size, blocks, bins, counts)
            .map_err(|e| Error::format(start, e.to_string()))?;
        records.push(DescriptorRecord { identity, descriptor });
    }
    if r.pos != bytes.len() {
        return Err(Error::format(r.pos, format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok(records)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<DescriptorRecord>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_records(&bytes)
}

/// Writes to a temporary file beside `path` and renames it into place, so
/// readers never see a partial file.
pub fn write_records(path: impl AsRef<Path>, records: &[DescriptorRecord]) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_records(records)?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(&bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
