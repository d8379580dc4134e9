//! Channel occupancy on an unwrapped time axis.
//!
//! Allocation times are linear slot indices starting at 1. A window
//! `[t, t + delay)` may run past the end of the cycle; time `s` then lands on
//! cycle slot `((s - 1) mod T) + 1`, which must still be free.

/// Cycle slot of linear time `time`.
pub fn cycle_slot(time: i64, cycle: u32) -> u32 {
    ((time - 1).rem_euclid(cycle as i64) + 1) as u32
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelState {
    busy: Vec<bool>,
    last_busy: i64,
}

impl ChannelState {
    pub fn new(cycle: u32) -> Self {
        Self { busy: vec![false; cycle as usize], last_busy: 0 }
    }

    /// State with the given cycle slots already taken.
    pub fn with_busy(cycle: u32, slots: &[u32]) -> Self {
        let mut s = Self::new(cycle);
        for &slot in slots {
            s.busy[(slot - 1) as usize] = true;
            s.last_busy = s.last_busy.max(slot as i64);
        }
        s
    }

    pub fn cycle(&self) -> u32 {
        self.busy.len() as u32
    }

    /// Last busy linear time, 0 for an empty channel.
    pub fn last_busy(&self) -> i64 {
        self.last_busy
    }

    pub fn is_free(&self, time: i64) -> bool {
        !self.busy[(cycle_slot(time, self.cycle()) - 1) as usize]
    }

    /// First `count` free times in `[start, deadline)`, skipping taken cycle
    /// slots. `None` if the window is too short.
    pub fn find_slots(&self, start: i64, count: u32, deadline: i64) -> Option<Vec<i64>> {
        let mut out = Vec::with_capacity(count as usize);
        let mut s = start;
        while (out.len() as u32) < count {
            if s >= deadline {
                return None;
            }
            if self.is_free(s) {
                out.push(s);
            }
            s += 1;
        }
        Some(out)
    }

    pub fn occupy(&mut self, times: &[i64]) {
        let cycle = self.cycle();
        for &s in times {
            let idx = (cycle_slot(s, cycle) - 1) as usize;
            assert!(!self.busy[idx], "time {s} already busy");
            self.busy[idx] = true;
            self.last_busy = self.last_busy.max(s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_slot_wraps() {
        assert_eq!(cycle_slot(1, 10), 1);
        assert_eq!(cycle_slot(10, 10), 10);
        assert_eq!(cycle_slot(11, 10), 1);
        assert_eq!(cycle_slot(0, 10), 10);
    }

    #[test]
    fn wrapped_search_skips_busy_prefix() {
        let mut ch = ChannelState::with_busy(10, &[1, 2]);
        assert_eq!(ch.find_slots(9, 4, 15), Some(vec![9, 10, 13, 14]));
        assert_eq!(ch.find_slots(9, 5, 15), None);
        ch.occupy(&[9, 10, 13]);
        assert_eq!(ch.last_busy(), 13);
        assert!(!ch.is_free(3));
    }

    #[test]
    fn empty_request_is_trivially_met() {
        let ch = ChannelState::new(5);
        assert_eq!(ch.find_slots(3, 0, 3), Some(vec![]));
    }
}
