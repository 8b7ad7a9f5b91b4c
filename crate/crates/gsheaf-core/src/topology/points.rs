use core::fmt;

/// Upper bound on the number of points in a space; subsets fit in a `u32`.
pub const MAX_POINTS: usize = 32;

/// A set of points of a finite space, packed into a bitmask.
///
/// The ordering is the numeric order of the underlying mask. It is used
/// only to keep containers deterministic, not as set inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet(u32);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    /// The set `{0, ..., num_points - 1}`.
    pub fn full(num_points: usize) -> PointSet {
        assert!(num_points <= MAX_POINTS, "spaces are capped at {MAX_POINTS} points");
        if num_points == MAX_POINTS {
            PointSet(u32::MAX)
        } else {
            PointSet((1u32 << num_points) - 1)
        }
    }

    pub fn singleton(point: usize) -> PointSet {
        assert!(point < MAX_POINTS, "spaces are capped at {MAX_POINTS} points");
        PointSet(1 << point)
    }

    pub fn from_points(points: impl IntoIterator<Item = usize>) -> PointSet {
        let mut set = PointSet::EMPTY;
        for p in points {
            set.insert(p);
        }
        set
    }

    pub fn from_bits(bits: u32) -> PointSet {
        PointSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, point: usize) -> bool {
        point < MAX_POINTS && self.0 & (1 << point) != 0
    }

    pub fn insert(&mut self, point: usize) {
        assert!(point < MAX_POINTS, "spaces are capped at {MAX_POINTS} points");
        self.0 |= 1 << point;
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_POINTS).filter(move |&p| self.contains(p))
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for p in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        f.write_str("}")
    }
}
