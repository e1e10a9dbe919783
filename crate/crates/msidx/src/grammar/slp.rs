//! Straight-line program over the text with length-augmented rules.
//!
//! Every rule is a terminal byte or an ordered pair of earlier rules, so
//! the grammar is acyclic by construction and each rule id expands to one
//! fixed string. `exp_len` caches expansion lengths, which drives random
//! access, extraction and the longest-common-extension cursors.
//!
//! Besides the formal root, the grammar keeps the irreducible top-level
//! sequence it was chained from. Cursors walk that sequence directly, so
//! positioning costs a binary search plus one descent instead of a walk
//! down the root chain.

/// One grammar rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlpRule {
    Terminal(u8),
    Pair(u32, u32),
}

/// Failure of a grammar query.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlpError {
    #[error("access out of bounds: {pos} + {len} > {n}")]
    OutOfBounds { pos: usize, len: usize, n: usize },
    #[error("malformed grammar: {0}")]
    Malformed(String),
}

/// Counters for LCE work.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LceStats {
    /// Byte comparisons (including terminal-id matches).
    pub char_compares: u64,
    /// Whole subtrees skipped on equal rule ids.
    pub subtree_skips: u64,
}

/// A straight-line program expanding to the text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slp {
    /// Rules; every pair references strictly smaller ids.
    pub rules: Vec<SlpRule>,
    /// Rule expanding to the whole text.
    pub root: u32,
    /// `exp_len[x]` is the expansion length of rule `x`.
    pub exp_len: Vec<usize>,
    top_seq: Vec<u32>,
    top_starts: Vec<usize>,
    n: usize,
}

impl Slp {
    /// Assembles a grammar from parts, validating structure.
    ///
    /// `top_seq` must be the left-to-right cover the root was chained
    /// from; its concatenated expansion must match the root's.
    pub fn from_parts(rules: Vec<SlpRule>, root: u32, top_seq: Vec<u32>) -> Result<Slp, SlpError> {
        let count = rules.len();
        if count == 0 {
            return Err(SlpError::Malformed("no rules".into()));
        }
        let mut exp_len = vec![0usize; count];
        for (i, rule) in rules.iter().enumerate() {
            match *rule {
                SlpRule::Terminal(_) => exp_len[i] = 1,
                SlpRule::Pair(l, r) => {
                    if l as usize >= i || r as usize >= i {
                        return Err(SlpError::Malformed(format!(
                            "rule {i} references a rule at or above itself"
                        )));
                    }
                    exp_len[i] = exp_len[l as usize] + exp_len[r as usize];
                }
            }
        }
        if root as usize >= count {
            return Err(SlpError::Malformed("root out of range".into()));
        }
        if top_seq.is_empty() {
            return Err(SlpError::Malformed("empty top sequence".into()));
        }
        if top_seq.iter().any(|&s| s as usize >= count) {
            return Err(SlpError::Malformed("top sequence symbol out of range".into()));
        }
        let n = exp_len[root as usize];
        let mut top_starts = Vec::with_capacity(top_seq.len() + 1);
        let mut acc = 0usize;
        for &s in &top_seq {
            top_starts.push(acc);
            acc += exp_len[s as usize];
        }
        top_starts.push(acc);
        if acc != n {
            return Err(SlpError::Malformed(format!(
                "top sequence expands to {acc}, root to {n}"
            )));
        }
        Ok(Slp { rules, root, exp_len, top_seq, top_starts, n })
    }

    /// Expansion length of the root, i.e. the text length.
    pub fn text_len(&self) -> usize {
        self.n
    }

    /// Number of rules, terminals included.
    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// The irreducible top-level cover of the text.
    pub fn top_seq(&self) -> &[u32] {
        &self.top_seq
    }

    /// Expands the root bottom-up without touching the top-level cover.
    pub fn expand_root(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n);
        let mut stack = vec![self.root];
        while let Some(s) = stack.pop() {
            match self.rules[s as usize] {
                SlpRule::Terminal(b) => out.push(b),
                SlpRule::Pair(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    /// The text byte at position `i` via length-guided descent.
    pub fn access(&self, i: usize) -> Result<u8, SlpError> {
        if i >= self.n {
            return Err(SlpError::OutOfBounds { pos: i, len: 1, n: self.n });
        }
        let k = self.top_starts.partition_point(|&s| s <= i) - 1;
        let mut off = i - self.top_starts[k];
        let mut cur = self.top_seq[k];
        loop {
            match self.rules[cur as usize] {
                SlpRule::Terminal(b) => return Ok(b),
                SlpRule::Pair(l, r) => {
                    let ll = self.exp_len[l as usize];
                    if off < ll {
                        cur = l;
                    } else {
                        off -= ll;
                        cur = r;
                    }
                }
            }
        }
    }

    /// Extracts `len` bytes starting at `i`.
    pub fn extract(&self, i: usize, len: usize) -> Result<Vec<u8>, SlpError> {
        if i + len > self.n {
            return Err(SlpError::OutOfBounds { pos: i, len, n: self.n });
        }
        let mut cur = SlpCursor::new(self, i);
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(cur.next_byte().expect("bounds checked"));
        }
        Ok(out)
    }

    /// A sequential byte reader starting at position `i <= n`.
    pub fn reader_at(&self, i: usize) -> Result<SlpReader<'_>, SlpError> {
        if i > self.n {
            return Err(SlpError::OutOfBounds { pos: i, len: 0, n: self.n });
        }
        Ok(SlpReader { cursor: SlpCursor::new(self, i) })
    }

    /// Longest common extension of positions `i` and `j` with subtree
    /// skipping.
    pub fn lce(&self, i: usize, j: usize) -> usize {
        let mut stats = LceStats::default();
        self.lce_impl(i, j, true, &mut stats)
    }

    /// Like [`Slp::lce`], accumulating work counters into `stats`.
    pub fn lce_with_stats(&self, i: usize, j: usize, stats: &mut LceStats) -> usize {
        self.lce_impl(i, j, true, stats)
    }

    /// Longest common extension by plain character extraction.
    pub fn lce_naive(&self, i: usize, j: usize) -> usize {
        let mut stats = LceStats::default();
        self.lce_impl(i, j, false, &mut stats)
    }

    /// Like [`Slp::lce_naive`], accumulating work counters into `stats`.
    pub fn lce_naive_with_stats(&self, i: usize, j: usize, stats: &mut LceStats) -> usize {
        self.lce_impl(i, j, false, stats)
    }

    fn lce_impl(&self, i: usize, j: usize, skip: bool, stats: &mut LceStats) -> usize {
        assert!(i < self.n && j < self.n, "lce positions must be in range");
        let mut a = SlpCursor::new(self, i);
        let mut b = SlpCursor::new(self, j);
        let mut total = 0usize;
        loop {
            let (ta, tb) = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => (x, y),
                _ => break,
            };
            if skip && ta == tb {
                let el = self.exp_len[ta as usize];
                if el > 1 {
                    stats.subtree_skips += 1;
                } else {
                    stats.char_compares += 1;
                }
                total += el;
                a.consume_top();
                b.consume_top();
                continue;
            }
            match (self.rules[ta as usize], self.rules[tb as usize]) {
                (SlpRule::Terminal(x), SlpRule::Terminal(y)) => {
                    stats.char_compares += 1;
                    if x == y {
                        total += 1;
                        a.consume_top();
                        b.consume_top();
                    } else {
                        break;
                    }
                }
                (SlpRule::Pair(..), _)
                    if self.exp_len[ta as usize] >= self.exp_len[tb as usize] =>
                {
                    a.expand_top();
                }
                _ => b.expand_top(),
            }
        }
        total
    }
}

/// Streaming traversal state: the pending subtrees of the current
/// top-level symbol plus the index of the next unstarted one.
struct SlpCursor<'a> {
    slp: &'a Slp,
    stack: Vec<u32>,
    next_top: usize,
}

impl<'a> SlpCursor<'a> {
    /// Positions the cursor at text offset `pos <= n`.
    fn new(slp: &'a Slp, pos: usize) -> SlpCursor<'a> {
        if pos >= slp.n {
            return SlpCursor { slp, stack: Vec::new(), next_top: slp.top_seq.len() };
        }
        let k = slp.top_starts.partition_point(|&s| s <= pos) - 1;
        let mut off = pos - slp.top_starts[k];
        // Rights peeled off while descending left are collected
        // outermost-first; they are consumed last, so they form the
        // bottom of the stack in that order.
        let mut stack = Vec::new();
        let mut cur = slp.top_seq[k];
        while off > 0 {
            match slp.rules[cur as usize] {
                SlpRule::Pair(l, r) => {
                    let ll = slp.exp_len[l as usize];
                    if off < ll {
                        stack.push(r);
                        cur = l;
                    } else {
                        off -= ll;
                        cur = r;
                    }
                }
                SlpRule::Terminal(_) => unreachable!("offset inside a terminal"),
            }
        }
        stack.push(cur);
        SlpCursor { slp, stack, next_top: k + 1 }
    }

    /// The subtree starting exactly at the current position.
    fn peek(&self) -> Option<u32> {
        match self.stack.last() {
            Some(&s) => Some(s),
            None => self.slp.top_seq.get(self.next_top).copied(),
        }
    }

    /// Consumes the peeked subtree whole.
    fn consume_top(&mut self) {
        if self.stack.pop().is_none() {
            self.next_top += 1;
        }
    }

    /// Replaces the peeked pair by its children.
    fn expand_top(&mut self) {
        let s = match self.stack.pop() {
            Some(s) => s,
            None => {
                let s = self.slp.top_seq[self.next_top];
                self.next_top += 1;
                s
            }
        };
        match self.slp.rules[s as usize] {
            SlpRule::Pair(l, r) => {
                self.stack.push(r);
                self.stack.push(l);
            }
            SlpRule::Terminal(_) => unreachable!("expand called on terminal"),
        }
    }

    /// Reads the byte at the current position and advances by one.
    fn next_byte(&mut self) -> Option<u8> {
        loop {
            let s = self.peek()?;
            match self.slp.rules[s as usize] {
                SlpRule::Terminal(b) => {
                    self.consume_top();
                    return Some(b);
                }
                SlpRule::Pair(..) => self.expand_top(),
            }
        }
    }
}

/// Public sequential reader over the text.
pub struct SlpReader<'a> {
    cursor: SlpCursor<'a>,
}

impl SlpReader<'_> {
    /// Next text byte, or `None` past the end.
    pub fn next_byte(&mut self) -> Option<u8> {
        self.cursor.next_byte()
    }
}
