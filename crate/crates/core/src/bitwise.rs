//! Per-sample boolean algebra: the two-random-word split, XOR restoration,
//! and what a single share bit reveals to an attacker who knows `r1`, `r2`.

use crate::error::Result;
use crate::word::{BitDepth, ChannelWord, RandomPair, Sample};

/// Splits one sample into two shares.
///
/// Bits of `p` that are set copy `r1` into the first share, cleared bits copy
/// `r2`; the second share is whatever XORs back to `p`.
#[inline]
pub fn share_word<T: Sample>(p: T, r1: T, r2: T) -> (T, T) {
    let s1 = (p & r1) | (!p & r2);
    (s1, p ^ s1)
}

#[inline]
pub fn restore_word<T: Sample>(s1: T, s2: T) -> T {
    s1 ^ s2
}

/// Depth-checked form of [`share_word`].
pub fn share_pair(p: ChannelWord, r: RandomPair) -> Result<(ChannelWord, ChannelWord)> {
    let depth = p.same_depth(r.r1())?;
    Ok(match depth {
        BitDepth::Eight => {
            let (s1, s2) = share_word(p.value() as u8, r.r1().value() as u8, r.r2().value() as u8);
            (ChannelWord::of(s1), ChannelWord::of(s2))
        }
        BitDepth::Sixteen => {
            let (s1, s2) = share_word(
                p.value() as u16,
                r.r1().value() as u16,
                r.r2().value() as u16,
            );
            (ChannelWord::of(s1), ChannelWord::of(s2))
        }
    })
}

/// Depth-checked form of [`restore_word`].
pub fn restore(s1: ChannelWord, s2: ChannelWord) -> Result<ChannelWord> {
    let depth = s1.same_depth(s2)?;
    ChannelWord::new(s1.value() ^ s2.value(), depth)
}

/// Single-bit truth table of the split, written out case by case.
///
/// Kept independent of [`share_word`] so it can serve as a reference.
pub fn share_bit_oracle(p: bool, r1: bool, r2: bool) -> (bool, bool) {
    match (p, r1, r2) {
        (false, false, false) => (false, false),
        (false, false, true) => (true, true),
        (false, true, false) => (false, false),
        (false, true, true) => (true, true),
        (true, false, false) => (false, true),
        (true, false, true) => (false, true),
        (true, true, false) => (true, false),
        (true, true, true) => (true, false),
    }
}

/// Outcome of inferring one source bit from one share bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitVerdict {
    Undetermined,
    /// The source bit is known to be 1. No observation ever pins a 0.
    DeterminedOne,
}

impl BitVerdict {
    pub fn is_determined(self) -> bool {
        self == BitVerdict::DeterminedOne
    }

    pub fn value(self) -> Option<bool> {
        match self {
            BitVerdict::Undetermined => None,
            BitVerdict::DeterminedOne => Some(true),
        }
    }
}

/// What an attacker learns from one share bit `q` when `r1` and `r2` are
/// known but it is unknown whether `q` came from the first or second share.
///
/// For every `(r1, r2)` one of the two shares is independent of `p` and
/// equals `r2`: the first share when `r1 == r2`, otherwise the second. If
/// `q == r2` it may be that constant share and nothing follows. If
/// `q != r2` it must be the other share, which differs from the constant
/// one only when `p = 1`.
pub fn partial_knowledge_bit(_r1: bool, r2: bool, q: bool) -> BitVerdict {
    if q != r2 {
        BitVerdict::DeterminedOne
    } else {
        BitVerdict::Undetermined
    }
}

/// Which share an attacker holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeldShare {
    First,
    Second,
}

/// Inference by an attacker who also knows which share `q` came from.
///
/// Returns the source bit whenever the held share depends on it: the first
/// share does exactly when `r1 != r2` (it is `p` or `NOT p`), the second
/// exactly when `r1 == r2` (it is `p` or `NOT p` again).
pub fn known_share_bit(r1: bool, r2: bool, q: bool, held: HeldShare) -> Option<bool> {
    match held {
        // s1 = p ? r1 : r2
        HeldShare::First if r1 != r2 => Some(q == r1),
        // s2 = p ? !r1 : r2
        HeldShare::Second if r1 == r2 => Some(q != r1),
        _ => None,
    }
}
