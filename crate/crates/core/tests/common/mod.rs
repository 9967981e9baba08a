#![allow(dead_code)]

/// Explicit iterate by string rewriting.
pub fn rewrite(rules: &[(char, &str)], axiom: char, k: u32) -> String {
    let mut w = axiom.to_string();
    for _ in 0..k {
        w = w.chars().map(|c| rules.iter().find(|r| r.0 == c).unwrap().1).collect();
    }
    w
}

pub fn thue_morse(k: u32) -> Vec<char> {
    rewrite(&[('A', "AB"), ('B', "BA")], 'A', k).chars().collect()
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// (count_A, count_B) over ranks 1..=n with labels start + (i-1)*stride.
pub fn brute_counts(word: &[char], start: i64, stride: i64, n: usize) -> (u64, u64) {
    let (mut a, mut b) = (0, 0);
    for (i, &c) in word.iter().enumerate().take(n) {
        if is_prime(start + i as i64 * stride) {
            if c == 'A' {
                a += 1
            } else {
                b += 1
            }
        }
    }
    (a, b)
}

/// D(x) for x = 1..=n.
pub fn brute_path(word: &[char], start: i64, stride: i64, n: usize) -> Vec<i64> {
    let mut d = 0;
    (0..n)
        .map(|i| {
            if is_prime(start + i as i64 * stride) {
                d += if word[i] == 'A' { 1 } else { -1 };
            }
            d
        })
        .collect()
}
