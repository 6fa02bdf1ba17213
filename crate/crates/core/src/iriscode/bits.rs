/// Densely packed bit vector. Bit `i` lives in word `i / 64` at position
/// `i % 64` (least significant first). Unused high bits of the last word are
/// always zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; len.div_ceil(64)],
        };
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                v.set(i, true);
            }
        }
        v
    }

    /// Build from raw words; bits past `len` are cleared.
    pub fn from_words(len: usize, words: Vec<u64>) -> Self {
        assert_eq!(words.len(), len.div_ceil(64), "word count");
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn not(&self) -> Self {
        let mut v = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.clear_tail();
        v
    }

    /// Read `count <= 64` bits starting at `start`, packed LSB first.
    #[inline]
    fn read(&self, start: usize, count: usize) -> u64 {
        debug_assert!(count <= 64 && start + count <= self.len);
        if count == 0 {
            return 0;
        }
        let wi = start / 64;
        let off = start % 64;
        let mut v = self.words[wi] >> off;
        if off + count > 64 {
            v |= self.words[wi + 1] << (64 - off);
        }
        if count < 64 {
            v &= (1u64 << count) - 1;
        }
        v
    }

    /// Rotate every row of `row_len` bits by `shift` positions:
    /// output bit `j` of a row takes input bit `(j - shift) mod row_len`.
    pub fn rotate_rows(&self, row_len: usize, shift: isize) -> Self {
        assert!(row_len > 0 && self.len.is_multiple_of(row_len), "length must be a multiple of the row length");
        let s = shift.rem_euclid(row_len as isize) as usize;
        if s == 0 {
            return self.clone();
        }
        let mut out = BitWriter::with_len(self.len);
        for row in 0..self.len / row_len {
            let base = row * row_len;
            out.copy_from(self, base + row_len - s, s);
            out.copy_from(self, base, row_len - s);
        }
        out.finish()
    }
}

/// Sequential writer that appends bit ranges in 64-bit chunks.
struct BitWriter {
    pos: usize,
    bits: BitVec,
}

impl BitWriter {
    fn with_len(len: usize) -> Self {
        Self {
            pos: 0,
            bits: BitVec::zeros(len),
        }
    }

    #[inline]
    fn push(&mut self, value: u64, count: usize) {
        if count == 0 {
            return;
        }
        let wi = self.pos / 64;
        let off = self.pos % 64;
        self.bits.words[wi] |= value << off;
        if off + count > 64 {
            self.bits.words[wi + 1] |= value >> (64 - off);
        }
        self.pos += count;
    }

    fn copy_from(&mut self, src: &BitVec, mut start: usize, mut count: usize) {
        while count > 0 {
            let k = count.min(64);
            self.push(src.read(start, k), k);
            start += k;
            count -= k;
        }
    }

    fn finish(self) -> BitVec {
        debug_assert_eq!(self.pos, self.bits.len);
        self.bits
    }
}
