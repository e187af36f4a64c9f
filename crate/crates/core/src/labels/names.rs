use std::fmt;

use serde::{Deserialize, Serialize};

use super::LabelError;
use crate::plant::{Placement, UplinkMode};

const BASE12: [char; 12] = ['0', '1', '2', '3', '4', '5', '6', '7', '8', '9', 'A', 'B'];

pub fn base12_digit(value: u8) -> Option<char> {
    BASE12.get(value as usize).copied()
}

pub fn base12_value(c: char) -> Option<u8> {
    BASE12.iter().position(|&d| d == c).map(|p| p as u8)
}

/// Direction of travel along the cable as seen from the panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Outbound,
    Return,
}

/// Letters used to print a [`Direction`]: `A`/`R` (aller/retour) or `A`/`B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DirectionLetters {
    #[serde(rename = "ar")]
    AR,
    #[serde(rename = "ab")]
    AB,
}

impl DirectionLetters {
    pub fn letter(self, direction: Direction) -> char {
        match (self, direction) {
            (_, Direction::Outbound) => 'A',
            (DirectionLetters::AR, Direction::Return) => 'R',
            (DirectionLetters::AB, Direction::Return) => 'B',
        }
    }

    pub fn direction(self, letter: char) -> Option<Direction> {
        match (self, letter) {
            (_, 'A') => Some(Direction::Outbound),
            (DirectionLetters::AR, 'R') | (DirectionLetters::AB, 'B') => Some(Direction::Return),
            _ => None,
        }
    }
}

/// Panel-side fiber reference `S-C-T-F`: direction, cable, tube, fiber.
///
/// Tube and fiber are 0-based and printed as base-12 digits, so digit `d`
/// corresponds to color row `d + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberRef {
    pub direction: Direction,
    pub cable: char,
    pub tube: u8,
    pub fiber: u8,
}

impl FiberRef {
    pub fn new(direction: Direction, cable: char, tube: u8, fiber: u8) -> Result<Self, LabelError> {
        if !is_cable_symbol(cable) {
            return Err(LabelError::InvalidField {
                field: "cable",
                value: cable.to_string(),
            });
        }
        for (field, v) in [("tube", tube), ("fiber", fiber)] {
            if v > 11 {
                return Err(LabelError::InvalidField {
                    field,
                    value: v.to_string(),
                });
            }
        }
        Ok(FiberRef {
            direction,
            cable,
            tube,
            fiber,
        })
    }

    pub fn encode(&self) -> String {
        self.encode_with(DirectionLetters::AR)
    }

    pub fn encode_with(&self, letters: DirectionLetters) -> String {
        // Fields are range-checked at construction.
        format!(
            "{}-{}-{}-{}",
            letters.letter(self.direction),
            self.cable,
            base12_digit(self.tube).unwrap_or('?'),
            base12_digit(self.fiber).unwrap_or('?'),
        )
    }

    pub fn parse(label: &str) -> Result<Self, LabelError> {
        Self::parse_with(label, DirectionLetters::AR)
    }

    pub fn parse_with(label: &str, letters: DirectionLetters) -> Result<Self, LabelError> {
        let chars: Vec<char> = label.chars().collect();
        let err = |position: usize, message: &str| LabelError::Parse {
            input: label.to_string(),
            position,
            message: message.to_string(),
        };
        for (i, c) in chars.iter().enumerate().take(7) {
            if i % 2 == 1 && *c != '-' {
                return Err(err(i, "expected '-'"));
            }
        }
        if chars.len() != 7 {
            return Err(err(chars.len().min(7), "expected 7 characters S-C-T-F"));
        }
        let direction = letters
            .direction(chars[0])
            .ok_or_else(|| err(0, "unknown direction letter"))?;
        let cable = chars[2];
        if !is_cable_symbol(cable) {
            return Err(err(2, "cable must be a digit or uppercase letter"));
        }
        let tube = base12_value(chars[4]).ok_or_else(|| err(4, "tube is not a base-12 digit"))?;
        let fiber = base12_value(chars[6]).ok_or_else(|| err(6, "fiber is not a base-12 digit"))?;
        Ok(FiberRef {
            direction,
            cable,
            tube,
            fiber,
        })
    }
}

impl fmt::Display for FiberRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

pub fn is_cable_symbol(c: char) -> bool {
    c.is_ascii_digit() || c.is_ascii_uppercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PortSuffix {
    Duplex,
    SimplexA,
    SimplexB,
}

impl PortSuffix {
    pub fn letter(self) -> char {
        match self {
            PortSuffix::Duplex => 'd',
            PortSuffix::SimplexA => 'a',
            PortSuffix::SimplexB => 'b',
        }
    }

    /// Suffix for an uplink whose first fiber is `fiber` (1-based).
    pub fn for_uplink(mode: UplinkMode, fiber: u32) -> PortSuffix {
        match mode {
            UplinkMode::Duplex => PortSuffix::Duplex,
            UplinkMode::Simplex if fiber % 2 == 1 => PortSuffix::SimplexA,
            UplinkMode::Simplex => PortSuffix::SimplexB,
        }
    }
}

/// Box-side port label such as `BR102.1d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxPortLabel {
    pub loop_no: u8,
    pub box_no: u8,
    pub pair_no: u32,
    pub suffix: PortSuffix,
}

/// Box name `BR` + loop digit + two-digit box number.
pub fn box_name(loop_no: usize, box_no: usize) -> String {
    format!("BR{loop_no}{box_no:02}")
}

impl BoxPortLabel {
    pub fn new(loop_no: u8, box_no: u8, pair_no: u32, suffix: PortSuffix) -> Result<Self, LabelError> {
        if loop_no > 9 {
            return Err(LabelError::InvalidField {
                field: "loop_no",
                value: loop_no.to_string(),
            });
        }
        if box_no > 99 {
            return Err(LabelError::InvalidField {
                field: "box_no",
                value: box_no.to_string(),
            });
        }
        if pair_no == 0 {
            return Err(LabelError::InvalidField {
                field: "pair_no",
                value: pair_no.to_string(),
            });
        }
        Ok(BoxPortLabel {
            loop_no,
            box_no,
            pair_no,
            suffix,
        })
    }

    pub fn box_name(&self) -> String {
        box_name(self.loop_no as usize, self.box_no as usize)
    }

    /// Label on the central panel: box name and pair, without suffix.
    pub fn panel_label(&self) -> String {
        format!("{}.{}", self.box_name(), self.pair_no)
    }

    pub fn encode(&self) -> String {
        format!("{}{}", self.panel_label(), self.suffix.letter())
    }

    pub fn parse(label: &str) -> Result<Self, LabelError> {
        let err = |position: usize, message: &str| LabelError::Parse {
            input: label.to_string(),
            position,
            message: message.to_string(),
        };
        let chars: Vec<char> = label.chars().collect();
        if chars.len() < 2 || chars[0] != 'B' || chars[1] != 'R' {
            let pos = if chars.first() == Some(&'B') { 1 } else { 0 };
            return Err(err(pos, "expected 'BR' prefix"));
        }
        let digit = |i: usize| -> Result<u8, LabelError> {
            chars
                .get(i)
                .and_then(|c| c.to_digit(10))
                .map(|d| d as u8)
                .ok_or_else(|| err(i, "expected decimal digit"))
        };
        let loop_no = digit(2)?;
        let box_no = digit(3)? * 10 + digit(4)?;
        if chars.get(5) != Some(&'.') {
            return Err(err(5, "expected '.'"));
        }
        let mut i = 6;
        let mut pair_no: u32 = 0;
        while let Some(d) = chars.get(i).and_then(|c| c.to_digit(10)) {
            if i == 6 && d == 0 {
                return Err(err(i, "pair number starts at 1"));
            }
            pair_no = pair_no
                .checked_mul(10)
                .and_then(|p| p.checked_add(d))
                .ok_or_else(|| err(i, "pair number too large"))?;
            i += 1;
        }
        if i == 6 {
            return Err(err(6, "expected pair number"));
        }
        let suffix = match chars.get(i) {
            Some('d') => PortSuffix::Duplex,
            Some('a') => PortSuffix::SimplexA,
            Some('b') => PortSuffix::SimplexB,
            _ => return Err(err(i, "expected suffix d, a or b")),
        };
        if chars.len() != i + 1 {
            return Err(err(i + 1, "trailing characters"));
        }
        BoxPortLabel::new(loop_no, box_no, pair_no, suffix)
    }
}

impl fmt::Display for BoxPortLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// DNS name `sw-<site>-<room>-<b|c><seq>`, lowercased.
pub fn switch_dns_name(site: &str, room: &str, placement: Placement, seq: u32) -> String {
    let p = match placement {
        Placement::Bureau => 'b',
        Placement::Couloir => 'c',
    };
    format!("sw-{}-{}-{}{}", site.trim(), room.trim(), p, seq).to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annex_fiber_reference() {
        let r = FiberRef::new(Direction::Outbound, '9', 0, 0).unwrap();
        assert_eq!(r.encode(), "A-9-0-0");
        assert_eq!(FiberRef::parse("A-9-0-0").unwrap(), r);
    }

    #[test]
    fn base12_high_digits() {
        let r = FiberRef::new(Direction::Return, 'B', 11, 10).unwrap();
        assert_eq!(r.encode(), "R-B-B-A");
        assert_eq!(r.encode_with(DirectionLetters::AB), "B-B-B-A");
        assert_eq!(FiberRef::parse_with("B-B-B-A", DirectionLetters::AB).unwrap(), r);
    }

    #[test]
    fn fiber_ref_parse_errors_carry_position() {
        match FiberRef::parse("A-9-0-C") {
            Err(LabelError::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("unexpected {other:?}"),
        }
        match FiberRef::parse("X-9-0-0") {
            Err(LabelError::Parse { position, .. }) => assert_eq!(position, 0),
            other => panic!("unexpected {other:?}"),
        }
        match FiberRef::parse("A_9-0-0") {
            Err(LabelError::Parse { position, .. }) => assert_eq!(position, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(FiberRef::parse("A-9-0").is_err());
        assert!(FiberRef::parse("A-9-0-00").is_err());
        assert!(FiberRef::parse("B-9-0-0").is_err());
    }

    #[test]
    fn box_port_labels() {
        let d = BoxPortLabel::new(1, 2, 1, PortSuffix::Duplex).unwrap();
        assert_eq!(d.encode(), "BR102.1d");
        assert_eq!(d.panel_label(), "BR102.1");
        let a = BoxPortLabel::new(1, 2, 2, PortSuffix::SimplexA).unwrap();
        assert_eq!(a.encode(), "BR102.2a");
        let x = BoxPortLabel::new(3, 14, 6, PortSuffix::Duplex).unwrap();
        assert_eq!(x.encode(), "BR314.6d");
        assert_eq!(BoxPortLabel::parse("BR314.6d").unwrap(), x);
    }

    #[test]
    fn box_port_parse_errors() {
        for bad in ["", "XR102.1d", "BR1.1d", "BR102-1d", "BR102.d", "BR102.1x", "BR102.1dd", "BR102.0d"] {
            assert!(BoxPortLabel::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn suffix_follows_fiber_parity() {
        assert_eq!(PortSuffix::for_uplink(UplinkMode::Duplex, 1), PortSuffix::Duplex);
        assert_eq!(PortSuffix::for_uplink(UplinkMode::Simplex, 3), PortSuffix::SimplexA);
        assert_eq!(PortSuffix::for_uplink(UplinkMode::Simplex, 4), PortSuffix::SimplexB);
    }

    #[test]
    fn dns_names() {
        assert_eq!(switch_dns_name("legi", "k213", Placement::Bureau, 1), "sw-legi-k213-b1");
        assert_eq!(switch_dns_name("neel", "z005", Placement::Couloir, 2), "sw-neel-z005-c2");
        assert_eq!(switch_dns_name("legi", "K213", Placement::Bureau, 1), "sw-legi-k213-b1");
    }
}
