/// Local extrema of a sampled sequence, as `(index, value)` pairs in
/// increasing index order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtremaSet {
    pub maxima: Vec<(usize, f64)>,
    pub minima: Vec<(usize, f64)>,
}

impl ExtremaSet {
    /// Maxima and minima combined.
    pub fn count(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }
}

/// Finds interior local maxima and minima.
///
/// A run of equal samples flanked on both sides by strictly lower (higher)
/// values is one maximum (minimum), reported at the midpoint of the run,
/// rounding down. Runs touching either end of the sequence are never
/// extrema.
pub fn find_extrema(x: &[f64]) -> ExtremaSet {
    let mut set = ExtremaSet::default();
    let n = x.len();
    if n < 3 {
        return set;
    }

    // skip a plateau glued to the left edge
    let mut i = 1;
    while i < n && x[i] == x[0] {
        i += 1;
    }

    while i < n - 1 {
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j == n - 1 {
            break;
        }
        let (left, value, right) = (x[i - 1], x[i], x[j + 1]);
        let mid = i + (j - i) / 2;
        if value > left && value > right {
            set.maxima.push((mid, value));
        } else if value < left && value < right {
            set.minima.push((mid, value));
        }
        i = j + 1;
    }
    set
}
