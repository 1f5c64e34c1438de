//! Design calculator and behavioral simulator for a 555-timer touch alarm:
//! a mains/battery supply with changeover relay, a monostable trigger, and a
//! two-oscillator siren driving a speaker through an emitter follower.

pub mod cli;
pub mod design;
pub mod export;
pub mod sim;
pub mod units;
