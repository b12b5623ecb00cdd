/// Fixed-size visited set over perfect ranks.
#[derive(Clone, Debug)]
pub struct VisitedSet {
    words: Vec<u64>,
    len: u64,
}

impl VisitedSet {
    pub fn new(len: u64) -> Self {
        VisitedSet {
            words: vec![0; len.div_ceil(64) as usize],
            len,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Marks `idx`; returns `false` if it was already marked.
    #[inline]
    pub fn insert(&mut self, idx: u64) -> bool {
        let (w, b) = ((idx >> 6) as usize, idx & 63);
        let mask = 1u64 << b;
        let fresh = self.words[w] & mask == 0;
        self.words[w] |= mask;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, idx: u64) {
        self.words[(idx >> 6) as usize] &= !(1 << (idx & 63));
    }

    #[inline]
    pub fn contains(&self, idx: u64) -> bool {
        self.words[(idx >> 6) as usize] & (1 << (idx & 63)) != 0
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Heap bytes held by the set.
    pub fn heap_bytes(&self) -> usize {
        self.words.capacity() * std::mem::size_of::<u64>()
    }
}
