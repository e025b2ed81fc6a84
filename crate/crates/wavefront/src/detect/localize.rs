//! Turns the per-direction verdicts into localized singular arcs.
//!
//! A singular component shows up as a run of singular directions that is
//! wider than the component itself, because every cone of half-aperture
//! `delta` touching the ridge sees it, and the Gaussian blur of the
//! transform widens it further. Around the run, the decay estimate climbs
//! out of a valley roughly quadratically in the angular offset. Fitting
//! `sqrt(eps - eps_0)` linearly on each wall and extrapolating to its zero
//! crossing gives the valley edge; subtracting the cone half-aperture
//! gives the component edge.

/// Maximal number of wall samples used per side.
pub const WALL_STEPS: usize = 12;
/// Wall samples rising more than this above the valley floor are not used.
pub const WALL_CAP: f64 = 1.0;
/// Width of the band that defines a valley bottom, in units of eps.
pub const BOTTOM_BAND: f64 = 0.02;
/// Interior maxima at least this far above both neighboring minima separate components.
pub const SPLIT_PROMINENCE: f64 = 0.1;

/// Closes isolated one-step regular gaps between singular neighbors.
pub fn close_gaps(sing: &[bool]) -> Vec<bool> {
    let n = sing.len();
    let mut out = sing.to_vec();
    for i in 0..n {
        if !sing[i] && sing[(i + n - 1) % n] && sing[(i + 1) % n] {
            out[i] = true;
        }
    }
    out
}

/// Circular runs `(first, last)` of singular directions; `last` may be < `first` when wrapping.
pub fn runs(sing: &[bool]) -> Vec<(usize, usize)> {
    let n = sing.len();
    if sing.iter().all(|&s| s) {
        return vec![(0, n - 1)];
    }
    let Some(start) = sing.iter().position(|&s| !s) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if sing[(start + i) % n] {
            let a = i;
            while i < n && sing[(start + i) % n] {
                i += 1;
            }
            out.push(((start + a) % n, (start + i - 1) % n));
        } else {
            i += 1;
        }
    }
    out
}

/// Zero crossing (in steps beyond the run end) of the wall on one side.
fn wall_offset(eps: &[f64], e0: f64, start: usize, forward: bool) -> f64 {
    let n = eps.len();
    let mut ts = Vec::new();
    let mut qs = Vec::new();
    for t in 1..=WALL_STEPS.min(n / 2) {
        let idx = if forward { (start + t) % n } else { (start + n * 2 - t) % n };
        let e = eps[idx];
        if !e.is_finite() {
            break;
        }
        let q = e - e0;
        if q > WALL_CAP {
            break;
        }
        if q > 0.0 {
            ts.push(t as f64);
            qs.push(q.sqrt());
        }
    }
    if ts.len() < 3 {
        return 0.0;
    }
    let m = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / m;
    let mq = qs.iter().sum::<f64>() / m;
    let sxx: f64 = ts.iter().map(|t| (t - mt) * (t - mt)).sum();
    let sxy: f64 = ts.iter().zip(&qs).map(|(t, q)| (t - mt) * (q - mq)).sum();
    let slope = sxy / sxx;
    if slope <= 0.0 {
        return 0.0;
    }
    let intercept = mq - slope * mt;
    -intercept / slope
}

/// Center of the contiguous band around the minimum of `eps` over the run
/// starting at `a` where `eps` stays within `BOTTOM_BAND` of that minimum.
fn valley_bottom(eps: &[f64], a: usize, len: usize) -> f64 {
    let n = eps.len() as i64;
    let at = |t: i64| eps[(a as i64 + t).rem_euclid(n) as usize];
    let best = (0..=len as i64).min_by(|&p, &q| at(p).total_cmp(&at(q))).unwrap();
    let cut = at(best) + BOTTOM_BAND;
    let mut lo = best;
    while best - lo < n / 2 && at(lo - 1) <= cut {
        lo -= 1;
    }
    let mut hi = best;
    while hi - best < n / 2 && at(hi + 1) <= cut {
        hi += 1;
    }
    a as f64 + (lo + hi) as f64 / 2.0
}

/// Splits the run `(a, a + len)` at interior maxima rising at least
/// `SPLIT_PROMINENCE` above the minima on both sides. Returns `(start, len)` pieces.
fn split_valleys(eps: &[f64], a: usize, len: usize) -> Vec<(usize, usize)> {
    let n = eps.len();
    let at = |t: usize| eps[(a + t) % n];
    let mut pieces = vec![(0usize, len)];
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (pi, &(s, l)) in pieces.iter().enumerate() {
            for m in s + 1..s + l {
                let left = (s..m).map(at).fold(f64::INFINITY, f64::min);
                let right = (m + 1..=s + l).map(at).fold(f64::INFINITY, f64::min);
                let prom = at(m) - left.max(right);
                if prom >= SPLIT_PROMINENCE && best.map_or(true, |(_, _, p)| prom > p) {
                    best = Some((pi, m, prom));
                }
            }
        }
        let Some((pi, m, _)) = best else { break };
        let (s, l) = pieces.remove(pi);
        pieces.insert(pi, (m, s + l - m));
        pieces.insert(pi, (s, m - s));
    }
    pieces.into_iter().map(|(s, l)| ((a + s) % n, l)).collect()
}

/// Localized arcs in index units `(lo, hi)`, `lo <= hi`, possibly outside `[0, n)`.
pub fn localize(eps: &[f64], sing: &[bool], delta_steps: f64) -> Vec<(f64, f64)> {
    let n = eps.len();
    let closed = close_gaps(sing);
    let mut out = Vec::new();
    for (a, b) in runs(&closed) {
        let len = (b + n - a) % n;
        if len + 1 == n {
            out.push((0.0, (n - 1) as f64));
            continue;
        }
        let parts = split_valleys(eps, a, len);
        if parts.len() > 1 {
            for (s, l) in parts {
                let m = valley_bottom(eps, s, l);
                out.push((m, m));
            }
            continue;
        }
        let e0 = (0..=len).map(|i| eps[(a + i) % n]).fold(f64::INFINITY, f64::min);
        let right = wall_offset(eps, e0, b, true);
        let left = wall_offset(eps, e0, a, false);
        let lo = a as f64 - (left - delta_steps);
        let hi = (a + len) as f64 + (right - delta_steps);
        // components narrower than the full cone aperture cannot be told from a point
        if hi - lo < 2.0 * delta_steps {
            let m = valley_bottom(eps, a, len);
            out.push((m, m));
        } else {
            out.push((lo, hi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_closing() {
        let s = [true, false, true, false, false, true];
        assert_eq!(close_gaps(&s), vec![true, true, true, false, false, true]);
    }

    #[test]
    fn wrapping_runs() {
        let s = [true, true, false, false, true];
        assert_eq!(runs(&s), vec![(4, 1)]);
        assert!(runs(&[false; 4]).is_empty());
        assert_eq!(runs(&[true; 3]), vec![(0, 2)]);
    }

    #[test]
    fn symmetric_valley_collapses_to_center() {
        // eps = 0.01 (t - 50)^2 around a point singularity at index 50
        let n = 360;
        let eps: Vec<f64> = (0..n).map(|i| 0.01 * ((i as f64 - 50.0).powi(2))).collect();
        let sing: Vec<bool> = eps.iter().map(|&e| e < 0.3).collect();
        let arcs = localize(&eps, &sing, 3.0);
        assert_eq!(arcs.len(), 1);
        let (lo, hi) = arcs[0];
        assert!((lo - 50.0).abs() < 1.0 && (hi - 50.0).abs() < 1.0, "{lo} {hi}");
    }
}
