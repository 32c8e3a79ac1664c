use std::collections::BTreeSet;

use memchr::memmem;

use super::substitution::{Letter, Substitution};

/// Legal two-letter words of the subshift generated from `seed`: the least set
/// containing the interior pairs of `σ(t)` for reachable `t` and closed under
/// taking the junction pair of `σ(xy)`.
pub fn two_letter_words(s: &Substitution, seed: Letter) -> BTreeSet<(Letter, Letter)> {
    let reach = s.reachable(seed);
    let mut set: BTreeSet<(Letter, Letter)> = BTreeSet::new();
    for (t, _) in reach.iter().enumerate().filter(|(_, r)| **r) {
        for w in s.image(t as Letter).windows(2) {
            set.insert((w[0], w[1]));
        }
    }
    let mut frontier: Vec<(Letter, Letter)> = set.iter().copied().collect();
    while let Some((x, y)) = frontier.pop() {
        let pair = (s.last(x), s.first(y));
        if set.insert(pair) {
            frontier.push(pair);
        }
    }
    set
}

/// Whether `word` occurs in `σ^k(xy)` for some legal pair `xy` (or letter)
/// with `|σ^k(xy)| ≤ max_len`. A `true` answer is a proof of legality.
pub fn occurs_in_language(s: &Substitution, seed: Letter, word: &[Letter], max_len: usize) -> bool {
    if word.is_empty() {
        return true;
    }
    let reach = s.reachable(seed);
    if word.len() == 1 {
        return reach[word[0] as usize];
    }
    let pairs = two_letter_words(s, seed);
    let finder = memmem::Finder::new(word);
    for (x, y) in pairs {
        let mut w = vec![x, y];
        while w.len() <= max_len {
            if w.len() >= word.len() && finder.find(&w).is_some() {
                return true;
            }
            let next: Vec<Letter> = w.iter().flat_map(|&l| s.image(l).iter().copied()).collect();
            if next.len() == w.len() {
                break;
            }
            w = next;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn north_pairs_contain_hand_list() {
        let s = bundled::north();
        let pairs = two_letter_words(&s, s.letter('a').unwrap());
        for w in ["dd", "db", "bc", "aa", "ac", "cc", "ca", "cd", "ad"] {
            let w = s.word(w).unwrap();
            assert!(pairs.contains(&(w[0], w[1])));
        }
    }

    #[test]
    fn single_letter_doubling() {
        let s = Substitution::parse("t -> tt\n").unwrap();
        assert_eq!(two_letter_words(&s, 0).into_iter().collect::<Vec<_>>(), vec![(0, 0)]);
    }

    #[test]
    fn membership() {
        let s = bundled::north();
        let a = s.letter('a').unwrap();
        assert!(occurs_in_language(&s, a, &s.word("ddbcddbc").unwrap(), 1 << 16));
        assert!(!occurs_in_language(&s, a, &s.word("bb").unwrap(), 1 << 16));
    }
}
