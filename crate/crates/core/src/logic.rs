use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Two-input Boolean functions realizable by the polymorphic gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateFunction {
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
}

impl GateFunction {
    pub const ALL: [GateFunction; 6] = [
        GateFunction::And,
        GateFunction::Or,
        GateFunction::Xor,
        GateFunction::Nand,
        GateFunction::Nor,
        GateFunction::Xnor,
    ];

    #[inline]
    pub fn apply(self, x: bool, w: bool) -> bool {
        match self {
            GateFunction::And => x & w,
            GateFunction::Or => x | w,
            GateFunction::Xor => x ^ w,
            GateFunction::Nand => !(x & w),
            GateFunction::Nor => !(x | w),
            GateFunction::Xnor => !(x ^ w),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateFunction::And => "and",
            GateFunction::Or => "or",
            GateFunction::Xor => "xor",
            GateFunction::Nand => "nand",
            GateFunction::Nor => "nor",
            GateFunction::Xnor => "xnor",
        }
    }
}

impl fmt::Display for GateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateFunction::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Format(format!("unknown gate `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complements() {
        for (x, w) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(GateFunction::And.apply(x, w), !GateFunction::Nand.apply(x, w));
            assert_eq!(GateFunction::Or.apply(x, w), !GateFunction::Nor.apply(x, w));
            assert_eq!(GateFunction::Xor.apply(x, w), !GateFunction::Xnor.apply(x, w));
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("XNOR".parse::<GateFunction>().unwrap(), GateFunction::Xnor);
        assert!("nope".parse::<GateFunction>().is_err());
    }
}
