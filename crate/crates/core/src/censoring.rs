//! Censored observations and the admissible rank ranges they induce.
//!
//! For right-censored data an observation is a time plus an event flag; for
//! case-2 interval censoring it is a half-open interval `(L, R]` (a point for
//! exact observations). In both cases the set of ranks the latent complete
//! value can take among the `n` latent values is a contiguous range, stored
//! as [`RankBounds`].

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::permspace::RankVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightObs {
    pub time: f64,
    /// `true` when the event was observed, `false` when right-censored.
    pub event: bool,
}

impl RightObs {
    pub fn event(time: f64) -> Self {
        RightObs { time, event: true }
    }

    pub fn censored(time: f64) -> Self {
        RightObs { time, event: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.time.is_finite() || self.time < 0.0 {
            return Err(Error::invalid(format!("time {} is not a finite nonnegative number", self.time)));
        }
        Ok(())
    }

    /// The same information as an interval: an exact point for events,
    /// `(time, inf)` for censored times.
    pub fn to_interval(&self) -> IntervalObs {
        if self.event {
            IntervalObs::exact(self.time)
        } else {
            IntervalObs::right_censored(self.time)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalKind {
    /// `(0, R]`
    Left,
    /// `(L, R]` with `0 < L < R < inf`
    Interval,
    /// `(L, inf)`
    Right,
    /// the single point `L = R`
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalObs {
    pub left: f64,
    pub right: f64,
    pub kind: IntervalKind,
}

impl IntervalObs {
    pub fn left_censored(right: f64) -> Self {
        IntervalObs { left: 0.0, right, kind: IntervalKind::Left }
    }

    pub fn interval(left: f64, right: f64) -> Self {
        IntervalObs { left, right, kind: IntervalKind::Interval }
    }

    pub fn right_censored(left: f64) -> Self {
        IntervalObs { left, right: f64::INFINITY, kind: IntervalKind::Right }
    }

    pub fn exact(value: f64) -> Self {
        IntervalObs { left: value, right: value, kind: IntervalKind::Exact }
    }

    /// Builds the observation from raw endpoints, inferring the kind:
    /// equal endpoints are exact, an infinite right end is right-censored and
    /// a zero left end is left-censored.
    pub fn from_endpoints(left: f64, right: f64) -> Result<Self> {
        let obs = if left == right {
            Self::exact(left)
        } else if right == f64::INFINITY {
            Self::right_censored(left)
        } else if left == 0.0 {
            Self::left_censored(right)
        } else {
            Self::interval(left, right)
        };
        obs.validate()?;
        Ok(obs)
    }

    pub fn validate(&self) -> Result<()> {
        let (l, r) = (self.left, self.right);
        let ok = match self.kind {
            IntervalKind::Left => l == 0.0 && r.is_finite() && r > 0.0,
            IntervalKind::Interval => l > 0.0 && l < r && r.is_finite(),
            IntervalKind::Right => l.is_finite() && l >= 0.0 && r == f64::INFINITY,
            IntervalKind::Exact => l.is_finite() && l >= 0.0 && l == r,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("malformed {:?} observation ({l}, {r}]", self.kind)))
        }
    }

    /// Whether `value` lies in the observation's set.
    pub fn contains(&self, value: f64) -> bool {
        match self.kind {
            IntervalKind::Exact => value == self.left,
            _ => value > self.left && value <= self.right,
        }
    }
}

/// Inclusive 1-based range of admissible ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankBounds {
    pub lo: u32,
    pub hi: u32,
}

impl RankBounds {
    pub fn new(lo: u32, hi: u32) -> Self {
        RankBounds { lo, hi }
    }

    #[inline]
    pub fn contains(&self, rank: u32) -> bool {
        self.lo <= rank && rank <= self.hi
    }

    pub fn width(&self) -> u32 {
        self.hi + 1 - self.lo
    }
}

fn count(it: impl Iterator<Item = bool>) -> u32 {
    it.filter(|&b| b).count() as u32
}

/// Admissible rank ranges for right-censored observations.
///
/// An event at `x_i` ranks above every event strictly below it and can be
/// pushed up past tied events and censored times strictly below it. A
/// censored time ranks above every event at or below it and may end up last.
pub fn rank_bounds_right(obs: &[RightObs]) -> Result<Vec<RankBounds>> {
    if obs.is_empty() {
        return Err(Error::invalid("no observations"));
    }
    for o in obs {
        o.validate()?;
    }
    let n = obs.len() as u32;
    let bounds = obs
        .iter()
        .map(|oi| {
            let x = oi.time;
            let events_below = count(obs.iter().map(|o| o.event && o.time < x));
            let events_at_or_below = count(obs.iter().map(|o| o.event && o.time <= x));
            if oi.event {
                let censored_below = count(obs.iter().map(|o| !o.event && o.time < x));
                RankBounds::new(events_below + 1, events_at_or_below + censored_below)
            } else {
                RankBounds::new(events_at_or_below + 1, n)
            }
        })
        .collect();
    Ok(bounds)
}

/// Admissible rank ranges for case-2 interval-censored observations.
///
/// Evaluates the four class formulas (left, interval, right, exact) term by
/// term, with both endpoints of an exact observation equal to its value.
/// Endpoint comparisons follow the printed strictness; on data with distinct
/// finite endpoints they agree with [`realizable`].
pub fn rank_bounds_interval(obs: &[IntervalObs]) -> Result<Vec<RankBounds>> {
    use IntervalKind::*;

    if obs.is_empty() {
        return Err(Error::invalid("no observations"));
    }
    for o in obs {
        o.validate()?;
    }
    let n = obs.len() as u32;
    let n_left = count(obs.iter().map(|o| o.kind == Left));

    let mut bounds = Vec::with_capacity(obs.len());
    for (i, oi) in obs.iter().enumerate() {
        let (li, ri) = (oi.left, oi.right);
        // sum over j not right-censored of I(R_j <= L_i), or I(R_j < L_i) for exact i
        let forced_below = |strict: bool| {
            count(obs.iter().map(|o| o.kind != Right && if strict { o.right < li } else { o.right <= li }))
        };
        // |I_L| + sum_{I_R u I_C} I(L_j < R_i) + sum_{I_U} I(L_j <= R_i)
        let upper_interval_exact = || {
            n_left
                + count(obs.iter().map(|o| matches!(o.kind, Right | Interval) && o.left < ri))
                + count(obs.iter().map(|o| o.kind == Exact && o.left <= ri))
        };
        let b = match oi.kind {
            Left => {
                let hi = n_left
                    + count(obs.iter().map(|o| o.kind == Right && o.left < ri))
                    + count(obs.iter().map(|o| o.kind == Exact && o.left < ri))
                    + count(obs.iter().map(|o| o.kind == Interval && o.left <= ri));
                RankBounds::new(1, hi)
            }
            Interval => RankBounds::new(forced_below(false) + 1, upper_interval_exact()),
            Right => RankBounds::new(forced_below(false) + 1, n),
            Exact => RankBounds::new(forced_below(true) + 1, upper_interval_exact()),
        };
        if b.lo < 1 || b.lo > b.hi || b.hi > n {
            return Err(Error::invalid(format!("observation {i} yields an empty rank range [{}, {}]", b.lo, b.hi)));
        }
        bounds.push(b);
    }
    Ok(bounds)
}

/// Lower bound on the next value in [`realizable`]: `value + steps * eps`
/// for an infinitesimal `eps`.
#[derive(Clone, Copy)]
struct Frontier {
    value: f64,
    steps: u32,
}

/// Whether some strictly increasing assignment of latent values, with the
/// i-th value inside observation i's set, puts the observations in the order
/// given by the ranks `r`.
///
/// Visits observations in rank order and always takes the smallest feasible
/// value, which is optimal for the rest of the sequence. Open left endpoints
/// are handled exactly by tracking infinitesimal offsets.
pub fn realizable(obs: &[IntervalObs], r: &RankVector) -> bool {
    assert_eq!(obs.len(), r.len(), "rank vector length does not match the data");
    assert!(r.is_permutation(), "rank vector is not a permutation");

    let order = r.inverse();
    let mut prev: Option<Frontier> = None;
    for &i in &order {
        let o = &obs[i];
        match o.kind {
            IntervalKind::Exact => {
                let x = o.left;
                if let Some(p) = prev {
                    if x <= p.value {
                        return false;
                    }
                }
                prev = Some(Frontier { value: x, steps: 0 });
            }
            _ => {
                let cand = match prev {
                    Some(p) if p.value >= o.left => Frontier { value: p.value, steps: p.steps + 1 },
                    _ => Frontier { value: o.left, steps: 1 },
                };
                if cand.value >= o.right {
                    return false;
                }
                prev = Some(cand);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rb(pairs: &[(u32, u32)]) -> Vec<RankBounds> {
        pairs.iter().map(|&(lo, hi)| RankBounds::new(lo, hi)).collect()
    }

    #[test]
    fn right_all_events_gives_ordinary_ranks() {
        let obs = [RightObs::event(3.0), RightObs::event(1.0), RightObs::event(2.0)];
        assert_eq!(rank_bounds_right(&obs).unwrap(), rb(&[(3, 3), (1, 1), (2, 2)]));
    }

    #[test]
    fn right_censored_in_the_middle() {
        let obs = [RightObs::event(2.0), RightObs::censored(3.0), RightObs::event(1.0)];
        assert_eq!(rank_bounds_right(&obs).unwrap(), rb(&[(2, 2), (3, 3), (1, 1)]));
    }

    #[test]
    fn right_censored_below_an_event() {
        let obs = [RightObs::censored(1.0), RightObs::event(2.0)];
        assert_eq!(rank_bounds_right(&obs).unwrap(), rb(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn right_ties_between_events_are_exchangeable() {
        let obs = [RightObs::event(1.0), RightObs::event(1.0), RightObs::event(0.5)];
        assert_eq!(rank_bounds_right(&obs).unwrap(), rb(&[(2, 3), (2, 3), (1, 1)]));
    }

    #[test]
    fn right_rejects_empty_and_bad_times() {
        assert!(matches!(rank_bounds_right(&[]), Err(Error::InvalidDataset(_))));
        assert!(rank_bounds_right(&[RightObs::event(f64::NAN)]).is_err());
        assert!(rank_bounds_right(&[RightObs::event(-1.0)]).is_err());
    }

    #[test]
    fn interval_complete_data() {
        let obs = [IntervalObs::exact(1.0), IntervalObs::exact(2.0), IntervalObs::exact(3.0)];
        assert_eq!(rank_bounds_interval(&obs).unwrap(), rb(&[(1, 1), (2, 2), (3, 3)]));
    }

    #[test]
    fn interval_left_censored_covering_an_exact_point() {
        let obs = [IntervalObs::left_censored(2.0), IntervalObs::exact(1.0)];
        assert_eq!(rank_bounds_interval(&obs).unwrap(), rb(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn interval_right_censored_are_exchangeable() {
        let obs = [IntervalObs::right_censored(5.0), IntervalObs::right_censored(7.0)];
        assert_eq!(rank_bounds_interval(&obs).unwrap(), rb(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn interval_rejects_malformed() {
        let bad = [
            IntervalObs { left: 1.0, right: 2.0, kind: IntervalKind::Left },
            IntervalObs { left: 0.0, right: 2.0, kind: IntervalKind::Interval },
            IntervalObs { left: 3.0, right: 2.0, kind: IntervalKind::Interval },
            IntervalObs { left: 3.0, right: 5.0, kind: IntervalKind::Right },
            IntervalObs { left: 3.0, right: 5.0, kind: IntervalKind::Exact },
            IntervalObs { left: 0.0, right: 0.0, kind: IntervalKind::Left },
        ];
        for o in bad {
            assert!(matches!(rank_bounds_interval(&[o]), Err(Error::InvalidDataset(_))), "{o:?}");
        }
        assert!(rank_bounds_interval(&[]).is_err());
    }

    #[test]
    fn from_endpoints_infers_kind() {
        assert_eq!(IntervalObs::from_endpoints(2.0, 2.0).unwrap().kind, IntervalKind::Exact);
        assert_eq!(IntervalObs::from_endpoints(0.0, 2.0).unwrap().kind, IntervalKind::Left);
        assert_eq!(IntervalObs::from_endpoints(1.0, 2.0).unwrap().kind, IntervalKind::Interval);
        assert_eq!(IntervalObs::from_endpoints(1.0, f64::INFINITY).unwrap().kind, IntervalKind::Right);
        assert!(IntervalObs::from_endpoints(3.0, 2.0).is_err());
    }

    #[test]
    fn realizable_examples() {
        let ex = [IntervalObs::exact(1.0), IntervalObs::exact(2.0)];
        assert!(realizable(&ex, &RankVector::new(vec![1, 2]).unwrap()));
        let ex_rev = [IntervalObs::exact(2.0), IntervalObs::exact(1.0)];
        assert!(!realizable(&ex_rev, &RankVector::new(vec![1, 2]).unwrap()));
        let mixed = [IntervalObs::left_censored(2.0), IntervalObs::exact(1.0)];
        assert!(realizable(&mixed, &RankVector::new(vec![2, 1]).unwrap()));
        assert!(realizable(&mixed, &RankVector::new(vec![1, 2]).unwrap()));
    }

    #[test]
    fn realizable_respects_open_left_endpoints() {
        // (1, 2] cannot sit below the point 1
        let obs = [IntervalObs::interval(1.0, 2.0), IntervalObs::exact(1.0)];
        assert!(!realizable(&obs, &RankVector::new(vec![1, 2]).unwrap()));
        assert!(realizable(&obs, &RankVector::new(vec![2, 1]).unwrap()));
        // anything beyond 1.3 must outrank (1.2, 1.3]
        let nested =
            [IntervalObs::interval(1.0, 1.5), IntervalObs::interval(1.2, 1.3), IntervalObs::right_censored(1.3)];
        assert!(realizable(&nested, &RankVector::new(vec![1, 2, 3]).unwrap()));
        assert!(!realizable(&nested, &RankVector::new(vec![2, 3, 1]).unwrap()));
    }

    #[test]
    #[should_panic]
    fn realizable_rejects_non_permutation() {
        let obs = [IntervalObs::exact(1.0), IntervalObs::exact(2.0)];
        realizable(&obs, &RankVector::from_unchecked(vec![1, 1]));
    }
}
