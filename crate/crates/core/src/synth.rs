//! Synthetic string background knowledge for scaling experiments.
//!
//! The generator materialises every nonempty string of length at most
//! `max_len` over the alphabet `{1..n}` and describes it with four
//! relations:
//!
//! * `string(s)` for every string,
//! * `head(s, c)` and `tail(s, r)` splitting off the first symbol,
//! * `append(x, y, s)` for every split of `s`, empty parts included.
//!
//! Strings are flat interned constants `s_<chars>` (the engine is
//! function-free), with the empty string named `s`. The bare name keeps it
//! outside the `s_<chars>` namespace: alphabet symbols render one character
//! each, `1`-`9` then `a`-`z` (capping the alphabet at 35), so a reserved
//! name like `s_e` would collide with the one-symbol string of the
//! fourteenth letter.
//!
//! Fact count: each of the `n^k` strings of length `k` contributes one
//! `string`, one `head`, one `tail`, and `k + 1` `append` facts, so
//!
//! ```text
//! total(n, L) = Σ_{k=1..L} (k + 4) · n^k
//! ```

use std::io::{self, Write};

use thiserror::Error;

use crate::kb::{Fact, FactStore, Symbol};

pub const MAX_ALPHABET: usize = 35;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("alphabet size must be between 1 and {MAX_ALPHABET}, got {0}")]
    BadAlphabet(usize),
    #[error("maximum string length must be at least 1, got {0}")]
    BadLength(usize),
    #[error("write failed: {0}")]
    Io(#[from] io::Error),
}

fn check(n: usize, max_len: usize) -> Result<(), SynthError> {
    if n == 0 || n > MAX_ALPHABET {
        return Err(SynthError::BadAlphabet(n));
    }
    if max_len == 0 {
        return Err(SynthError::BadLength(max_len));
    }
    Ok(())
}

/// Analytic fact count; saturates at `u128::MAX` on overflow so size
/// guards always trip for absurd parameters.
pub fn fact_count(n: usize, max_len: usize) -> Result<u128, SynthError> {
    check(n, max_len)?;
    let n = n as u128;
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for k in 1..=max_len as u128 {
        level = level.saturating_mul(n);
        total = total.saturating_add(level.saturating_mul(k + 4));
    }
    Ok(total)
}

fn symbol_char(value: u8) -> char {
    debug_assert!((1..=MAX_ALPHABET as u8).contains(&value));
    if value <= 9 {
        (b'0' + value) as char
    } else {
        (b'a' + value - 10) as char
    }
}

fn render(chars: &[u8]) -> String {
    if chars.is_empty() {
        return "s".into();
    }
    let mut out = String::with_capacity(2 + chars.len());
    out.push_str("s_");
    out.extend(chars.iter().map(|&c| symbol_char(c)));
    out
}

/// Walks all strings in canonical order (ascending length, then
/// lexicographic by symbol) and hands each to `emit`.
fn each_string<E>(
    n: usize,
    max_len: usize,
    emit: &mut impl FnMut(&[u8]) -> Result<(), E>,
) -> Result<(), E> {
    let mut current: Vec<u8> = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        current.clear();
        current.resize(len, 1);
        loop {
            emit(&current)?;
            // Odometer over digits 1..=n; wrapping past the last string of
            // this length moves on to the next length.
            let mut wrapped = true;
            for pos in (0..len).rev() {
                if current[pos] < n as u8 {
                    current[pos] += 1;
                    wrapped = false;
                    break;
                }
                current[pos] = 1;
            }
            if wrapped {
                break;
            }
        }
    }
    Ok(())
}

/// Writes the generated facts as Datalog text, one per line, grouped by
/// predicate and sorted in canonical string order. Byte-identical across
/// runs. Returns the number of facts written.
pub fn write_facts(n: usize, max_len: usize, out: &mut impl Write) -> Result<u64, SynthError> {
    check(n, max_len)?;
    let mut written: u64 = 0;
    each_string(n, max_len, &mut |s: &[u8]| -> Result<(), SynthError> {
        written += 1;
        writeln!(out, "string({}).", render(s)).map_err(SynthError::from)
    })?;
    each_string(n, max_len, &mut |s: &[u8]| -> Result<(), SynthError> {
        written += 1;
        writeln!(out, "head({},{}).", render(s), render(&s[..1])).map_err(SynthError::from)
    })?;
    each_string(n, max_len, &mut |s: &[u8]| -> Result<(), SynthError> {
        written += 1;
        writeln!(out, "tail({},{}).", render(s), render(&s[1..])).map_err(SynthError::from)
    })?;
    each_string(n, max_len, &mut |s: &[u8]| -> Result<(), SynthError> {
        for cut in 0..=s.len() {
            written += 1;
            writeln!(out, "append({},{},{}).", render(&s[..cut]), render(&s[cut..]), render(s))?;
        }
        Ok(())
    })?;
    Ok(written)
}

/// Builds the same facts directly into a store, for in-process use.
pub fn build_store(n: usize, max_len: usize) -> Result<FactStore, SynthError> {
    check(n, max_len)?;
    let mut store = FactStore::new();
    let string_p = store.intern("string");
    let head_p = store.intern("head");
    let tail_p = store.intern("tail");
    let append_p = store.intern("append");
    let sym = |store: &mut FactStore, s: &[u8]| -> Symbol { store.intern(&render(s)) };
    let done: Result<(), SynthError> = each_string(n, max_len, &mut |s: &[u8]| {
        let whole = sym(&mut store, s);
        let first = sym(&mut store, &s[..1]);
        let rest = sym(&mut store, &s[1..]);
        let put = |store: &mut FactStore, fact: Fact| {
            store.insert_fact(&fact).expect("generator arities are consistent");
        };
        put(&mut store, Fact::new(string_p, vec![whole]));
        put(&mut store, Fact::new(head_p, vec![whole, first]));
        put(&mut store, Fact::new(tail_p, vec![whole, rest]));
        for cut in 0..=s.len() {
            let left = sym(&mut store, &s[..cut]);
            let right = sym(&mut store, &s[cut..]);
            put(&mut store, Fact::new(append_p, vec![left, right, whole]));
        }
        Ok(())
    });
    done?;
    Ok(store)
}
