use std::fmt;

const WORD: usize = 64;

pub(crate) fn words_for(wavelengths: usize) -> usize {
    wavelengths.div_ceil(WORD)
}

/// Set of wavelength indices in `[0, W)`, stored as a bit mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WavelengthSet {
    bits: Vec<u64>,
    universe: usize,
}

impl WavelengthSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            bits: vec![0; words_for(universe)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for (i, word) in set.bits.iter_mut().enumerate() {
            let remaining = universe - i * WORD;
            *word = if remaining >= WORD {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            };
        }
        set
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// The complement of a used-wavelength mask.
    pub(crate) fn free_from_used(universe: usize, used: &[u64]) -> Self {
        let mut set = Self::full(universe);
        for (word, &u) in set.bits.iter_mut().zip(used) {
            *word &= !u;
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, wavelength: usize) {
        assert!(wavelength < self.universe, "wavelength out of range");
        self.bits[wavelength / WORD] |= 1 << (wavelength % WORD);
    }

    pub fn remove(&mut self, wavelength: usize) {
        if wavelength < self.universe {
            self.bits[wavelength / WORD] &= !(1 << (wavelength % WORD));
        }
    }

    pub fn contains(&self, wavelength: usize) -> bool {
        wavelength < self.universe && self.bits[wavelength / WORD] & (1 << (wavelength % WORD)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Lowest index in the set (first-fit choice).
    pub fn first(&self) -> Option<usize> {
        self.bits
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn intersect_with(&mut self, other: &Self) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(|&i| self.contains(i))
    }
}

impl fmt::Debug for WavelengthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
