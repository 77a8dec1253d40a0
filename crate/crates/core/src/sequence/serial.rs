//! JSON form of schedules: durations in integer nanoseconds, phases in
//! integer units of π/1024, so a round trip is bit-exact.

use std::path::Path;

use super::schedule::GateSchedule;
use crate::Result;

pub fn schedule_to_json(s: &GateSchedule) -> Result<String> {
    Ok(serde_json::to_string_pretty(s)?)
}

pub fn schedule_from_json(text: &str) -> Result<GateSchedule> {
    let s: GateSchedule = serde_json::from_str(text)?;
    s.validate()?;
    Ok(s)
}

pub fn write_schedule(path: &Path, s: &GateSchedule) -> Result<()> {
    std::fs::write(path, schedule_to_json(s)?)?;
    Ok(())
}

pub fn read_schedule(path: &Path) -> Result<GateSchedule> {
    schedule_from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::EffectiveParams;
    use crate::sequence::{build_addressing_schedule, build_entangling_schedule, EnvelopeSpec};

    #[test]
    fn round_trip_is_exact() {
        let p = EffectiveParams::operating_default();
        for s in [
            build_entangling_schedule(&p, &EnvelopeSpec::default()).unwrap(),
            build_addressing_schedule(crate::TWO_PI * 20e3, -0.7).unwrap(),
        ] {
            let text = schedule_to_json(&s).unwrap();
            let back = schedule_from_json(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(schedule_to_json(&back).unwrap(), text);
        }
    }

    #[test]
    fn rejects_bad_sign() {
        let p = EffectiveParams::operating_default();
        let s = build_entangling_schedule(&p, &EnvelopeSpec::default()).unwrap();
        let text = schedule_to_json(&s).unwrap().replacen("\"walsh_sign\": 1", "\"walsh_sign\": 3", 1);
        assert!(schedule_from_json(&text).is_err());
    }
}
