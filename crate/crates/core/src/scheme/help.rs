//! Wire format of the help message.
//!
//! ```text
//! "AVS1"
//! u32 claim count, then per claim: u32 key, u64 value (canonical field element)
//! u32 coefficient count, then u64 coefficients of P' (ascending degree)
//! u32 coefficient count, then u64 coefficients of Q'
//! ```
//!
//! All integers are little-endian. The verifier consumes this with
//! [`HelpReader`] in a single pass and never buffers the claims.

use crate::ff::{DensePoly, Fe, Field};

pub const MAGIC: &[u8; 4] = b"AVS1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelpMessage {
    /// `(j, f'_j)` in strictly ascending key order.
    pub claims: Vec<(u32, Fe)>,
    pub p: DensePoly,
    pub q: DensePoly,
}

impl HelpMessage {
    pub fn encode(&self, field: &Field) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.claims.len() as u32).to_le_bytes());
        for &(j, v) in &self.claims {
            out.extend_from_slice(&j.to_le_bytes());
            out.extend_from_slice(&field.encode(v));
        }
        self.p.encode_into(field, &mut out);
        self.q.encode_into(field, &mut out);
        out
    }

    pub fn encoded_len(&self) -> usize {
        8 + 12 * self.claims.len() + self.p.encoded_len() + self.q.encoded_len()
    }

    /// Structural decode: magic, lengths and canonical field elements only.
    /// Semantic checks (ordering, ranges, degrees) belong to the verifier.
    pub fn decode(field: &Field, bytes: &[u8]) -> Option<Self> {
        let mut rd = HelpReader::new(bytes);
        rd.magic()?;
        let count = rd.u32()? as usize;
        let mut claims = Vec::with_capacity(count.min(bytes.len() / 12));
        for _ in 0..count {
            claims.push((rd.u32()?, rd.fe(field)?));
        }
        let p = rd.poly(field)?;
        let q = rd.poly(field)?;
        rd.at_end().then_some(Self { claims, p, q })
    }
}

/// Help cost in bits.
pub fn hcost_bits(bytes: &[u8]) -> u64 {
    8 * bytes.len() as u64
}

/// Forward-only cursor over an encoded help message.
#[derive(Clone, Debug)]
pub struct HelpReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HelpReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take<const N: usize>(&mut self) -> Option<[u8; N]> {
        let end = self.pos.checked_add(N)?;
        let chunk = self.bytes.get(self.pos..end)?;
        self.pos = end;
        chunk.try_into().ok()
    }

    pub fn magic(&mut self) -> Option<()> {
        (self.take::<4>()? == *MAGIC).then_some(())
    }

    pub fn u32(&mut self) -> Option<u32> {
        self.take().map(u32::from_le_bytes)
    }

    pub fn u64(&mut self) -> Option<u64> {
        self.take().map(u64::from_le_bytes)
    }

    /// A field element; non-canonical encodings are rejected.
    pub fn fe(&mut self, field: &Field) -> Option<Fe> {
        field.from_canonical(self.u64()?)
    }

    fn poly(&mut self, field: &Field) -> Option<DensePoly> {
        let len = self.u32()? as usize;
        if len > self.remaining() / 8 {
            return None;
        }
        (0..len)
            .map(|_| self.fe(field))
            .collect::<Option<Vec<_>>>()
            .map(DensePoly::new)
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub fn at_end(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_help_layout() {
        let f = Field::new(101).unwrap();
        let h = HelpMessage {
            claims: vec![],
            p: DensePoly::new(vec![]),
            q: DensePoly::new(vec![]),
        };
        let bytes = h.encode(&f);
        assert_eq!(bytes.len(), 16);
        assert_eq!(hcost_bits(&bytes), 128);
        assert_eq!(&bytes[..4], b"AVS1");
    }

    #[test]
    fn known_bytes() {
        let f = Field::new(101).unwrap();
        let h = HelpMessage {
            claims: vec![(3, f.elem(100))],
            p: DensePoly::new(vec![f.elem(7)]),
            q: DensePoly::new(vec![]),
        };
        let bytes = h.encode(&f);
        let mut want = b"AVS1".to_vec();
        want.extend([1, 0, 0, 0, 3, 0, 0, 0, 100, 0, 0, 0, 0, 0, 0, 0]);
        want.extend([1, 0, 0, 0, 7, 0, 0, 0, 0, 0, 0, 0]);
        want.extend([0, 0, 0, 0]);
        assert_eq!(bytes, want);
    }

    #[test]
    fn decode_rejects_garbage() {
        let f = Field::new(101).unwrap();
        assert!(HelpMessage::decode(&f, b"").is_none());
        assert!(HelpMessage::decode(&f, b"AVS2\0\0\0\0\0\0\0\0\0\0\0\0").is_none());
        // coefficient 101 is not canonical
        let mut b = b"AVS1".to_vec();
        b.extend([0, 0, 0, 0, 1, 0, 0, 0, 101, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert!(HelpMessage::decode(&f, &b).is_none());
        // trailing byte
        let mut ok = b"AVS1".to_vec();
        ok.extend([0u8; 12]);
        assert!(HelpMessage::decode(&f, &ok).is_some());
        ok.push(0);
        assert!(HelpMessage::decode(&f, &ok).is_none());
    }

    proptest! {
        #[test]
        fn roundtrip(
            claims in prop::collection::vec((any::<u32>(), 0u64..1_000_003), 0..20),
            p in prop::collection::vec(0u64..1_000_003, 0..30),
            q in prop::collection::vec(0u64..1_000_003, 0..30),
        ) {
            let f = Field::new(1_000_003).unwrap();
            let h = HelpMessage {
                claims: claims.into_iter().map(|(j, v)| (j, f.elem(v))).collect(),
                p: DensePoly::new(p.into_iter().map(|v| f.elem(v)).collect()),
                q: DensePoly::new(q.into_iter().map(|v| f.elem(v)).collect()),
            };
            let bytes = h.encode(&f);
            prop_assert_eq!(bytes.len(), h.encoded_len());
            prop_assert_eq!(HelpMessage::decode(&f, &bytes), Some(h));
        }
    }
}
