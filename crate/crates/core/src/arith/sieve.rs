use num_integer::Roots;

/// Segment width in integers; memory per stream is independent of `hi - lo`.
const SEGMENT: u64 = 1 << 18;

/// Plain sieve of Eratosthenes on `[0, limit]`.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Ascending stream of the primes in `[lo, hi]`, produced one segment at a
/// time. Empty when `lo > hi`.
pub struct PrimeRange {
    base: Vec<u64>,
    next_lo: u64,
    hi: u64,
    segment: Vec<u64>,
    pos: usize,
    marks: Vec<bool>,
}

pub fn primes_in_range(lo: u64, hi: u64) -> PrimeRange {
    let lo = lo.max(2);
    let base = if lo <= hi {
        simple_sieve(hi.sqrt())
    } else {
        Vec::new()
    };
    PrimeRange {
        base,
        next_lo: lo,
        hi,
        segment: Vec::new(),
        pos: 0,
        marks: Vec::new(),
    }
}

impl PrimeRange {
    fn fill(&mut self) -> bool {
        while self.next_lo <= self.hi {
            let lo = self.next_lo;
            let hi = self.hi.min(lo.saturating_add(SEGMENT - 1));
            self.next_lo = hi.saturating_add(1);
            if hi == u64::MAX {
                self.next_lo = u64::MAX;
                self.hi = u64::MAX - 1;
            }
            // odd numbers only: index i stands for first + 2i
            let first = lo | 1;
            self.segment.clear();
            if lo <= 2 && 2 <= hi {
                self.segment.push(2);
            }
            if first <= hi {
                let len = ((hi - first) / 2 + 1) as usize;
                self.marks.clear();
                self.marks.resize(len, true);
                for &p in self.base.iter().skip(1) {
                    if p * p > hi {
                        break;
                    }
                    let mut j = (first.div_ceil(p) * p).max(p * p);
                    if j % 2 == 0 {
                        j += p;
                    }
                    while j <= hi {
                        self.marks[((j - first) / 2) as usize] = false;
                        j += 2 * p;
                    }
                }
                self.segment.extend(
                    self.marks
                        .iter()
                        .enumerate()
                        .filter(|(_, &m)| m)
                        .map(|(i, _)| first + 2 * i as u64)
                        .filter(|&n| n > 1),
                );
            }
            self.pos = 0;
            if !self.segment.is_empty() {
                return true;
            }
        }
        false
    }
}

impl Iterator for PrimeRange {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.segment.len() && !self.fill() {
            return None;
        }
        let p = self.segment[self.pos];
        self.pos += 1;
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn examples() {
        assert_eq!(primes_in_range(2, 10).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert_eq!(primes_in_range(90, 100).collect::<Vec<_>>(), vec![97]);
        assert_eq!(primes_in_range(2, 999_999).count(), 78_498);
        assert_eq!(primes_in_range(10, 5).count(), 0);
    }

    #[test]
    fn matches_trial_division_to_1e5() {
        let got: Vec<u64> = primes_in_range(2, 100_000).collect();
        let want: Vec<u64> = (2..=100_000).filter(|&n| naive(n)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn segment_boundaries_and_offsets() {
        let lo = SEGMENT * 3 - 50;
        let hi = SEGMENT * 3 + 50;
        let got: Vec<u64> = primes_in_range(lo, hi).collect();
        let want: Vec<u64> = (lo..=hi).filter(|&n| naive(n)).collect();
        assert_eq!(got, want);
        assert_eq!(primes_in_range(0, 3).collect::<Vec<_>>(), vec![2, 3]);
    }
}
