//! Compact, canonical byte encodings used for element serialization.
//!
//! Ball construction breaks BFS ties by the lexicographic order of these
//! bytes, and the on-disk ball cache stores them, so the encoding must be
//! deterministic and injective. It is not a public interchange format.

use num_bigint::{BigInt, Sign};

pub fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

pub fn put_zigzag(out: &mut Vec<u8>, v: i64) {
    put_varint(out, ((v << 1) ^ (v >> 63)) as u64);
}

pub fn put_bigint(out: &mut Vec<u8>, v: &BigInt) {
    let (sign, bytes) = v.to_bytes_le();
    let tag = match sign {
        Sign::Minus => 0u8,
        Sign::NoSign => 1,
        Sign::Plus => 2,
    };
    out.push(tag);
    if tag == 1 {
        return;
    }
    put_varint(out, bytes.len() as u64);
    out.extend_from_slice(&bytes);
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

#[derive(Debug)]
pub struct Truncated;

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn byte(&mut self) -> Result<u8, Truncated> {
        let b = *self.buf.get(self.pos).ok_or(Truncated)?;
        self.pos += 1;
        Ok(b)
    }

    pub fn varint(&mut self) -> Result<u64, Truncated> {
        let mut v = 0u64;
        let mut shift = 0u32;
        loop {
            let b = self.byte()?;
            v |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
            shift += 7;
            if shift >= 64 {
                return Err(Truncated);
            }
        }
    }

    pub fn zigzag(&mut self) -> Result<i64, Truncated> {
        let v = self.varint()?;
        Ok(((v >> 1) as i64) ^ -((v & 1) as i64))
    }

    pub fn bigint(&mut self) -> Result<BigInt, Truncated> {
        let tag = self.byte()?;
        if tag == 1 {
            return Ok(BigInt::from(0));
        }
        let len = self.varint()? as usize;
        if self.pos + len > self.buf.len() {
            return Err(Truncated);
        }
        let bytes = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        let sign = if tag == 0 { Sign::Minus } else { Sign::Plus };
        Ok(BigInt::from_bytes_le(sign, bytes))
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], Truncated> {
        if self.pos + n > self.buf.len() {
            return Err(Truncated);
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn is_empty(&self) -> bool {
        self.pos == self.buf.len()
    }
}
