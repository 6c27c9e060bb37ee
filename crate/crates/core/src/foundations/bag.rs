use std::collections::BTreeMap;
use std::fmt;

/// An element of a finite data alphabet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataSymbol(String);

impl DataSymbol {
    pub fn new(name: impl Into<String>) -> Self {
        DataSymbol(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DataSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite multiset over data symbols.
///
/// Stored as a count map with no zero entries, so equality is multiset
/// equality and the `Display` form (symbols in sorted order) is canonical —
/// usable as a hash key for configuration dedup.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bag {
    counts: BTreeMap<DataSymbol, u32>,
}

impl Bag {
    pub fn empty() -> Self {
        Bag::default()
    }

    pub fn singleton(d: DataSymbol) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(d, 1);
        Bag { counts }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total size: the sum of all multiplicities.
    pub fn len(&self) -> usize {
        self.counts.values().map(|&c| c as usize).sum()
    }

    pub fn count(&self, d: &DataSymbol) -> u32 {
        self.counts.get(d).copied().unwrap_or(0)
    }

    pub fn contains(&self, d: &DataSymbol) -> bool {
        self.counts.contains_key(d)
    }

    /// Distinct symbols with non-zero multiplicity, in sorted order.
    pub fn support(&self) -> impl Iterator<Item = &DataSymbol> {
        self.counts.keys()
    }

    /// (symbol, multiplicity) pairs in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = (&DataSymbol, u32)> {
        self.counts.iter().map(|(d, &c)| (d, c))
    }

    pub fn add(&mut self, d: DataSymbol) {
        *self.counts.entry(d).or_insert(0) += 1;
    }

    /// Multiset union: counts are pointwise sums.
    pub fn union(&self, other: &Bag) -> Bag {
        let mut counts = self.counts.clone();
        for (d, c) in &other.counts {
            *counts.entry(d.clone()).or_insert(0) += c;
        }
        Bag { counts }
    }

    /// Removes one occurrence of `d`, or `None` when `d` does not occur.
    ///
    /// Absence is a value rather than an error: it is what enables the
    /// negative (`-d`) transition tests.
    pub fn remove_one(&self, d: &DataSymbol) -> Option<Bag> {
        let c = self.counts.get(d)?;
        let mut counts = self.counts.clone();
        if *c == 1 {
            counts.remove(d);
        } else {
            counts.insert(d.clone(), c - 1);
        }
        Some(Bag { counts })
    }
}

impl FromIterator<DataSymbol> for Bag {
    fn from_iter<I: IntoIterator<Item = DataSymbol>>(iter: I) -> Self {
        let mut bag = Bag::empty();
        for d in iter {
            bag.add(d);
        }
        bag
    }
}

impl fmt::Display for Bag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (d, c) in self.iter() {
            for _ in 0..c {
                if !first {
                    f.write_str(",")?;
                }
                write!(f, "{}", d)?;
                first = false;
            }
        }
        f.write_str("}")
    }
}
