//! Local maxima with topographic prominence on a sampled curve.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub height: f64,
    pub prominence: f64,
}

/// Interior local maxima (plateaus count once, at their left edge) with
/// their prominence: height above the higher of the two lowest points
/// reached before climbing past the peak on either side.
pub fn find_peaks(y: &[f64]) -> Vec<Peak> {
    let n = y.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            // walk across a plateau
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                out.push(Peak {
                    index: i,
                    height: y[i],
                    prominence: prominence(y, i, j),
                });
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence(y: &[f64], left: usize, right: usize) -> f64 {
    let h = y[left];
    let mut left_min = h;
    for k in (0..left).rev() {
        if y[k] > h {
            break;
        }
        left_min = left_min.min(y[k]);
    }
    let mut right_min = h;
    for &v in &y[right + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Peaks whose prominence is at least `fraction` of the curve maximum.
pub fn prominent_peaks(y: &[f64], fraction: f64) -> Vec<Peak> {
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() || max <= 0.0 {
        return Vec::new();
    }
    find_peaks(y)
        .into_iter()
        .filter(|p| p.prominence >= fraction * max)
        .collect()
}
