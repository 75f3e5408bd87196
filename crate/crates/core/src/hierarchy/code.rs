/// Integer identifier shared by concept codes, property codes and
/// individual ids. Codes up to 128 bits wide fit natively.
pub type Id = u128;

/// Widest code the in-memory representation can hold.
pub const MAX_SUPPORTED_WIDTH: u32 = Id::BITS;

/// A hierarchy code: a left-aligned bit vector plus the placement of the
/// entity's own segment within it.
///
/// Bit offsets count from the most significant end of a `code_length`-bit
/// word. The bits at offsets `>= start + local_length` are always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EntityCode {
    pub value: Id,
    pub start: u32,
    pub local_length: u32,
    pub code_length: u32,
}

impl EntityCode {
    /// Number of bits of `value` that identify this entity and its ancestors.
    pub fn prefix_length(&self) -> u32 {
        self.start + self.local_length
    }

    /// Width of the zero padding on the right.
    pub fn shift(&self) -> u32 {
        self.code_length - self.prefix_length()
    }

    /// Exclusive upper end of the subsumption interval `[value, bound)`.
    pub fn bound(&self) -> Id {
        bound(self)
    }

    /// Interval membership: true iff `candidate` carries this code's prefix.
    #[inline]
    pub fn contains(&self, candidate: Id) -> bool {
        self.value <= candidate && candidate < self.bound()
    }

    /// The value of this code's tree parent, i.e. the value with its own
    /// segment cleared. `None` for the root.
    pub fn parent_value(&self) -> Option<Id> {
        if self.start == 0 {
            return None;
        }
        let keep = self.code_length - self.start;
        Some(shr(self.value, keep) << keep)
    }

    /// The local segment as an unsigned integer.
    pub fn local_value(&self) -> Id {
        let seg = shr(self.value, self.shift());
        seg & low_mask(self.local_length)
    }

    /// The code as a string of `code_length` binary digits.
    pub fn to_bit_string(&self) -> String {
        (0..self.code_length)
            .map(|i| {
                let bit = shr(self.value, self.code_length - 1 - i) & 1;
                if bit == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

/// Upper bound of an entity's subsumption interval:
/// `((value >> shift) + 1) << shift` with `shift = codeLength - (start + localLength)`.
#[inline]
pub fn bound(code: &EntityCode) -> Id {
    let shift = code.shift();
    (shr(code.value, shift) + 1) << shift
}

#[inline]
fn shr(v: Id, n: u32) -> Id {
    v.checked_shr(n).unwrap_or(0)
}

pub(crate) fn low_mask(bits: u32) -> Id {
    if bits >= Id::BITS {
        Id::MAX
    } else {
        (1 << bits) - 1
    }
}

/// Bits needed to give `n` siblings distinct non-zero local values.
pub fn segment_bits(n: usize) -> u32 {
    // ceil(log2(n + 1)) == bit length of n
    Id::BITS - (n as Id).leading_zeros()
}
