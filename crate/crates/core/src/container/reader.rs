use super::{ContainerError, FourCc};

/// Bounds-checked little-endian cursor. Offsets in errors are absolute file
/// positions; `context` names the chunk being read.
#[derive(Clone)]
pub(crate) struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    base: u64,
    context: FourCc,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(data: &'a [u8], base: u64, context: FourCc) -> Self {
        Self { data, pos: 0, base, context }
    }

    pub(crate) fn offset(&self) -> u64 {
        self.base + self.pos as u64
    }

    pub(crate) fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    pub(crate) fn truncated(&self, needed: usize) -> ContainerError {
        ContainerError::Truncated {
            offset: self.offset(),
            fourcc: self.context,
            needed: needed as u64,
            available: self.remaining() as u64,
        }
    }

    pub(crate) fn bytes(&mut self, len: usize) -> Result<&'a [u8], ContainerError> {
        if len > self.remaining() {
            return Err(self.truncated(len));
        }
        let out = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    /// Splits off the next `len` bytes as a sub-reader for chunk `fourcc`.
    pub(crate) fn sub(&mut self, len: usize, fourcc: FourCc) -> Result<Reader<'a>, ContainerError> {
        let base = self.offset();
        if len > self.remaining() {
            return Err(ContainerError::Truncated {
                offset: base,
                fourcc,
                needed: len as u64,
                available: self.remaining() as u64,
            });
        }
        let data = self.bytes(len)?;
        Ok(Reader::new(data, base, fourcc))
    }

    pub(crate) fn skip(&mut self, len: usize) -> Result<(), ContainerError> {
        self.bytes(len).map(|_| ())
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], ContainerError> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.bytes(N)?);
        Ok(out)
    }

    pub(crate) fn fourcc(&mut self) -> Result<FourCc, ContainerError> {
        self.array().map(FourCc)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, ContainerError> {
        Ok(self.array::<1>()?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16, ContainerError> {
        self.array().map(u16::from_le_bytes)
    }

    pub(crate) fn u32(&mut self) -> Result<u32, ContainerError> {
        self.array().map(u32::from_le_bytes)
    }

    pub(crate) fn i32(&mut self) -> Result<i32, ContainerError> {
        self.array().map(i32::from_le_bytes)
    }

    pub(crate) fn u64(&mut self) -> Result<u64, ContainerError> {
        self.array().map(u64::from_le_bytes)
    }

    pub(crate) fn f64(&mut self) -> Result<f64, ContainerError> {
        self.array().map(f64::from_le_bytes)
    }
}
