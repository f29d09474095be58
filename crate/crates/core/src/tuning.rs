//! Open-string tunings and string/fret to pitch resolution.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::instrument::InstrumentId;

pub const MAX_FRET: u32 = 30;

/// Open pitches of each course, course 1 (highest string) first, plus a
/// uniform downtune offset in semitones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuning {
    open_pitches: Vec<u8>,
    downtune: i32,
}

impl Tuning {
    pub fn new(open_pitches: Vec<u8>, downtune: i32) -> Result<Self, Error> {
        if !(4..=7).contains(&open_pitches.len()) {
            return Err(Error::InvalidTuning(format!("{} courses; expected 4 to 7", open_pitches.len())));
        }
        if downtune > 0 {
            return Err(Error::InvalidTuning(format!("downtune {downtune} is positive")));
        }
        let tuning = Tuning { open_pitches, downtune };
        for course in 1..=tuning.course_count() {
            let p = tuning.open_pitches[course - 1] as i32 + downtune;
            if !(0..=127).contains(&p) {
                return Err(Error::InvalidTuning(format!("course {course} sounds at {p} after downtune")));
            }
        }
        Ok(tuning)
    }

    pub fn guitar6() -> Self {
        Tuning { open_pitches: vec![64, 59, 55, 50, 45, 40], downtune: 0 }
    }

    pub fn guitar7() -> Self {
        Tuning { open_pitches: vec![64, 59, 55, 50, 45, 40, 35], downtune: 0 }
    }

    pub fn bass4() -> Self {
        Tuning { open_pitches: vec![43, 38, 33, 28], downtune: 0 }
    }

    pub fn bass5() -> Self {
        Tuning { open_pitches: vec![43, 38, 33, 28, 23], downtune: 0 }
    }

    pub fn with_downtune(&self, downtune: i32) -> Result<Self, Error> {
        Tuning::new(self.open_pitches.clone(), downtune)
    }

    pub fn course_count(&self) -> usize {
        self.open_pitches.len()
    }

    pub fn open_pitches(&self) -> &[u8] {
        &self.open_pitches
    }

    pub fn downtune(&self) -> i32 {
        self.downtune
    }
}

/// `open_pitches[course] + downtune + fret`.
pub fn resolve_pitch(tuning: &Tuning, course: u32, fret: u32) -> Result<u8, Error> {
    resolve_with_downtune(tuning, course, fret, tuning.downtune)
}

pub(crate) fn resolve_with_downtune(tuning: &Tuning, course: u32, fret: u32, downtune: i32) -> Result<u8, Error> {
    if course == 0 || course as usize > tuning.course_count() {
        return Err(Error::CourseOutOfRange { course, courses: tuning.course_count() });
    }
    if fret > MAX_FRET {
        return Err(Error::FretOutOfRange(fret));
    }
    let pitch = tuning.open_pitches[course as usize - 1] as i64 + downtune as i64 + fret as i64;
    u8::try_from(pitch).ok().filter(|p| *p <= 127).ok_or(Error::PitchOutOfRange(pitch))
}

/// Tuning per pitched instrument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuningSet {
    tunings: BTreeMap<InstrumentId, Tuning>,
}

impl Default for TuningSet {
    /// Six-string standard for every guitar, four-string standard for bass.
    fn default() -> Self {
        let tunings = InstrumentId::PITCHED
            .iter()
            .map(|&i| (i, if i.is_bass() { Tuning::bass4() } else { Tuning::guitar6() }))
            .collect();
        TuningSet { tunings }
    }
}

impl TuningSet {
    pub fn set(&mut self, instrument: InstrumentId, tuning: Tuning) -> Result<(), Error> {
        let allowed: &[usize] = match instrument {
            InstrumentId::Drums => {
                return Err(Error::InvalidTuning("drums take no tuning".into()));
            }
            InstrumentId::Bass => &[4, 5],
            _ => &[6, 7],
        };
        if !allowed.contains(&tuning.course_count()) {
            return Err(Error::InvalidTuning(format!("{instrument} cannot have {} courses", tuning.course_count())));
        }
        self.tunings.insert(instrument, tuning);
        Ok(())
    }

    pub fn get(&self, instrument: InstrumentId) -> Option<&Tuning> {
        self.tunings.get(&instrument)
    }

    /// Every tuning with its downtune replaced.
    pub fn with_downtune(&self, downtune: i32) -> Result<Self, Error> {
        let tunings =
            self.tunings.iter().map(|(&i, t)| Ok((i, t.with_downtune(downtune)?))).collect::<Result<_, Error>>()?;
        Ok(TuningSet { tunings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_low_e() {
        assert_eq!(resolve_pitch(&Tuning::guitar6(), 6, 0).unwrap(), 40);
        assert_eq!(resolve_pitch(&Tuning::guitar6(), 1, 0).unwrap(), 64);
    }

    #[test]
    fn downtune_is_additive() {
        let drop = Tuning::guitar6().with_downtune(-2).unwrap();
        assert_eq!(resolve_pitch(&drop, 6, 0).unwrap(), 38);
    }

    #[test]
    fn bass_fifth_fret() {
        assert_eq!(resolve_pitch(&Tuning::bass4(), 4, 5).unwrap(), 33);
    }

    #[test]
    fn course_out_of_range() {
        let err = resolve_pitch(&Tuning::guitar6(), 7, 0).unwrap_err();
        assert_eq!(err.code(), "E013");
        assert_eq!(resolve_pitch(&Tuning::guitar7(), 7, 0).unwrap(), 35);
        assert_eq!(resolve_pitch(&Tuning::bass4(), 0, 0).unwrap_err().code(), "E013");
    }

    #[test]
    fn tuning_limits() {
        assert!(Tuning::new(vec![1, 2, 3], 0).is_err());
        assert!(Tuning::bass5().with_downtune(-24).is_err());
        assert!(Tuning::guitar6().with_downtune(1).is_err());
        let mut set = TuningSet::default();
        assert!(set.set(InstrumentId::Bass, Tuning::guitar6()).is_err());
        assert!(set.set(InstrumentId::Distorted0, Tuning::guitar7()).is_ok());
        assert!(set.set(InstrumentId::Drums, Tuning::bass4()).is_err());
    }

    #[test]
    fn high_fret_overflows() {
        let high = Tuning::new(vec![120, 110, 100, 90, 80, 70], 0).unwrap();
        assert_eq!(resolve_pitch(&high, 1, 10).unwrap_err().code(), "E020");
    }
}
