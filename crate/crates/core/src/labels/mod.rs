//! Color codes, fiber and port naming, and label sheets.
//!
//! Color tables are 1-based. Fiber references print tube and fiber as
//! 0-based base-12 digits, so digit `d` names color `d + 1`.

mod colors;
mod names;
mod sheets;

pub use colors::ColorScheme;
pub use names::{
    base12_digit, base12_value, box_name, is_cable_symbol, switch_dns_name, BoxPortLabel,
    Direction, DirectionLetters, FiberRef, PortSuffix,
};
pub use sheets::{
    label_sheets, BoxRecord, LabelSheets, PanelRecord, SwitchRecord, RESERVE_MARK,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("range error: color index {index} outside 1..12")]
    Range { index: u32 },
    #[error("unknown color '{name}' in scheme {scheme}")]
    UnknownColor { scheme: ColorScheme, name: String },
    #[error("parse error in '{input}' at position {position}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },
    #[error("invalid {field}: {value}")]
    InvalidField { field: &'static str, value: String },
}
