//! Dynamic sliding window of trust ratings.
//!
//! A device keeps one [`TrustWindow`] per service provider. Ratings land in
//! the in-progress slot; every `slot_duration` seconds the slot is closed,
//! appended to the window, and the oldest slots are trimmed so that the
//! window holds at most `max_rating` ratings without dropping below
//! `min_rating`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WindowError {
    #[error("rating value {0} is outside [0, 1]")]
    InvalidValue(f64),
    #[error("rating timestamp {0} is negative or not finite")]
    InvalidTimestamp(f64),
    #[error("rating at t={timestamp} does not fall in the current slot [{start}, {end})")]
    OutsideCurrentSlot { timestamp: f64, start: f64, end: f64 },
    #[error("invalid window configuration: {0}")]
    InvalidConfig(String),
}

/// A single service rating in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustRating {
    value: f64,
    timestamp: f64,
}

impl TrustRating {
    pub fn new(value: f64, timestamp: f64) -> Result<Self, WindowError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(WindowError::InvalidValue(value));
        }
        if !timestamp.is_finite() || timestamp < 0.0 {
            return Err(WindowError::InvalidTimestamp(timestamp));
        }
        Ok(Self { value, timestamp })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSlot {
    start_time: f64,
    ratings: Vec<TrustRating>,
}

impl TimeSlot {
    pub fn new(start_time: f64) -> Self {
        Self {
            start_time,
            ratings: Vec::new(),
        }
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn ratings(&self) -> &[TrustRating] {
        &self.ratings
    }

    pub fn count(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }
}

/// Slot length and the transaction bounds used when trimming.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub slot_duration: f64,
    pub max_rating: usize,
    pub min_rating: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            slot_duration: 20.0,
            max_rating: 20,
            min_rating: 5,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<(), WindowError> {
        if !(self.slot_duration.is_finite() && self.slot_duration > 0.0) {
            return Err(WindowError::InvalidConfig(format!(
                "slot duration must be positive, got {}",
                self.slot_duration
            )));
        }
        if self.min_rating < 1 {
            return Err(WindowError::InvalidConfig("min_rating must be at least 1".into()));
        }
        if self.max_rating < self.min_rating {
            return Err(WindowError::InvalidConfig(format!(
                "max_rating ({}) must be >= min_rating ({})",
                self.max_rating, self.min_rating
            )));
        }
        Ok(())
    }
}

/// Closed slots (oldest first) plus the slot currently being filled.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustWindow {
    slots: VecDeque<TimeSlot>,
    current: TimeSlot,
    config: WindowConfig,
}

impl TrustWindow {
    pub fn new(config: WindowConfig, start_time: f64) -> Result<Self, WindowError> {
        config.validate()?;
        Ok(Self {
            slots: VecDeque::new(),
            current: TimeSlot::new(start_time),
            config,
        })
    }

    /// Builds a window from already-closed slots given as rating values.
    ///
    /// Slot `i` starts at `i * slot_duration` and its ratings are spread
    /// evenly inside it. The current slot starts right after the last one.
    pub fn from_slot_values(config: WindowConfig, slots: &[Vec<f64>]) -> Result<Self, WindowError> {
        let mut window = Self::new(config, 0.0)?;
        for (i, values) in slots.iter().enumerate() {
            let start = i as f64 * config.slot_duration;
            window.current = TimeSlot::new(start);
            let step = config.slot_duration / (values.len() + 1) as f64;
            for (j, &v) in values.iter().enumerate() {
                window.record(TrustRating::new(v, start + step * (j + 1) as f64)?)?;
            }
            let closed = std::mem::replace(&mut window.current, TimeSlot::new(0.0));
            window.slots.push_back(closed);
        }
        window.current = TimeSlot::new(slots.len() as f64 * config.slot_duration);
        Ok(window)
    }

    pub fn config(&self) -> &WindowConfig {
        &self.config
    }

    pub fn closed_slots(&self) -> impl ExactSizeIterator<Item = &TimeSlot> + '_ {
        self.slots.iter()
    }

    pub fn current_slot(&self) -> &TimeSlot {
        &self.current
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_counts(&self) -> Vec<usize> {
        self.slots.iter().map(TimeSlot::count).collect()
    }

    /// Ratings in closed slots paired with the 1-based position of their slot.
    pub fn positioned_ratings(&self) -> impl Iterator<Item = (usize, &TrustRating)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .flat_map(|(i, slot)| slot.ratings.iter().map(move |r| (i + 1, r)))
    }

    pub fn closed_count(&self) -> usize {
        self.slots.iter().map(TimeSlot::count).sum()
    }

    /// Ratings across the closed slots and the current slot.
    pub fn transaction_count(&self) -> usize {
        self.closed_count() + self.current.count()
    }

    pub fn record(&mut self, rating: TrustRating) -> Result<(), WindowError> {
        let start = self.current.start_time;
        let end = start + self.config.slot_duration;
        let t = rating.timestamp;
        if t < start || t >= end {
            return Err(WindowError::OutsideCurrentSlot {
                timestamp: t,
                start,
                end,
            });
        }
        if let Some(last) = self.current.ratings.last() {
            if t < last.timestamp {
                return Err(WindowError::OutsideCurrentSlot {
                    timestamp: t,
                    start: last.timestamp,
                    end,
                });
            }
        }
        self.current.ratings.push(rating);
        Ok(())
    }

    /// Appends the current slot to the window, trims oldest slots while the
    /// window holds more than `max_rating` ratings and dropping the oldest
    /// slot would still leave at least `min_rating`, then opens a fresh slot
    /// at `next_start`. Returns the number of slots removed.
    pub fn close_slot_and_adjust(&mut self, next_start: f64) -> usize {
        let closed = std::mem::replace(&mut self.current, TimeSlot::new(next_start));
        self.slots.push_back(closed);

        let mut count = self.closed_count();
        let mut removed = 0;
        if count > self.config.max_rating {
            let mut remaining = count - self.slots.front().map_or(0, TimeSlot::count);
            while remaining >= self.config.min_rating && count > self.config.max_rating {
                self.slots.pop_front();
                removed += 1;
                count = remaining;
                remaining = count - self.slots.front().map_or(0, TimeSlot::count);
            }
        }
        removed
    }
}
