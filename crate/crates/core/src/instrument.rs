use std::fmt;
use std::str::FromStr;

/// Track identity within a song. `Drums` is the only unpitched instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InstrumentId {
    Distorted0,
    Distorted1,
    Distorted2,
    Clean0,
    Clean1,
    Leads0,
    Bass,
    Drums,
}

impl InstrumentId {
    pub const ALL: [InstrumentId; 8] = [
        InstrumentId::Distorted0,
        InstrumentId::Distorted1,
        InstrumentId::Distorted2,
        InstrumentId::Clean0,
        InstrumentId::Clean1,
        InstrumentId::Leads0,
        InstrumentId::Bass,
        InstrumentId::Drums,
    ];

    pub const PITCHED: [InstrumentId; 7] = [
        InstrumentId::Distorted0,
        InstrumentId::Distorted1,
        InstrumentId::Distorted2,
        InstrumentId::Clean0,
        InstrumentId::Clean1,
        InstrumentId::Leads0,
        InstrumentId::Bass,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InstrumentId::Distorted0 => "distorted0",
            InstrumentId::Distorted1 => "distorted1",
            InstrumentId::Distorted2 => "distorted2",
            InstrumentId::Clean0 => "clean0",
            InstrumentId::Clean1 => "clean1",
            InstrumentId::Leads0 => "leads0",
            InstrumentId::Bass => "bass",
            InstrumentId::Drums => "drums",
        }
    }

    pub fn is_pitched(self) -> bool {
        self != InstrumentId::Drums
    }

    pub fn is_bass(self) -> bool {
        self == InstrumentId::Bass
    }
}

impl fmt::Display for InstrumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown instrument `{0}`")]
pub struct UnknownInstrument(pub String);

impl FromStr for InstrumentId {
    type Err = UnknownInstrument;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InstrumentId::ALL.iter().copied().find(|i| i.as_str() == s).ok_or_else(|| UnknownInstrument(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for inst in InstrumentId::ALL {
            assert_eq!(inst.as_str().parse::<InstrumentId>().unwrap(), inst);
        }
        assert!("keys0".parse::<InstrumentId>().is_err());
    }

    #[test]
    fn only_drums_unpitched() {
        let unpitched: Vec<_> = InstrumentId::ALL.iter().filter(|i| !i.is_pitched()).collect();
        assert_eq!(unpitched, vec![&InstrumentId::Drums]);
    }
}
