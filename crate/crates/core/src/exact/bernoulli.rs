use std::sync::Mutex;

use num_traits::Zero;

use super::rat::{rint, Rat};

static TABLE: Mutex<Vec<Rat>> = Mutex::new(Vec::new());

/// Bernoulli numbers with B_1 = -1/2, so that u/(e^u - 1) = sum B_n u^n / n!.
pub fn bernoulli(n: usize) -> Rat {
    bernoulli_table(n + 1)[n].clone()
}

/// The first `len` Bernoulli numbers.
pub fn bernoulli_table(len: usize) -> Vec<Rat> {
    let mut table = TABLE.lock().unwrap_or_else(|e| e.into_inner());
    while table.len() < len {
        let m = table.len();
        if m == 0 {
            table.push(rint(1));
            continue;
        }
        // sum_{k=0}^{m} C(m+1, k) B_k = 0
        let mut binom = rint(1);
        let mut acc = Rat::zero();
        for (k, bk) in table.iter().enumerate() {
            acc += &binom * bk;
            binom = binom * rint((m + 1 - k) as i64) / rint((k + 1) as i64);
        }
        table.push(-acc / rint((m + 1) as i64));
    }
    table[..len].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn known_values() {
        assert_eq!(bernoulli(0), rint(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rint(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }
}
