use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LabelError;

/// Twelve-color numbering code for tubes and fibers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorScheme {
    /// IEEE 802.8 code, the usual choice on FTTO sites.
    Fotag,
    Alphabetic,
    #[serde(rename = "francetelecom")]
    FranceTelecom,
}

struct Entry {
    name: &'static str,
    aliases: &'static [&'static str],
}

const fn e(name: &'static str, aliases: &'static [&'static str]) -> Entry {
    Entry { name, aliases }
}

const FOTAG: [Entry; 12] = [
    e("Bleu", &["Bl", "Blu", "Blue"]),
    e("Orange", &["Or"]),
    e("Vert", &["Gr", "Green"]),
    e("Marron", &["Br", "Brown"]),
    e("Gris", &["Sl", "Grey", "Slate"]),
    e("Blanc", &["Wh", "White"]),
    e("Rouge", &["Rd", "Red"]),
    e("Noir", &["Bk", "Black"]),
    e("Jaune", &["Yl", "Yellow"]),
    e("Violet", &["Vi", "Purple"]),
    e("Rose", &["Pk", "Pink"]),
    e("Turquoise", &["Tu"]),
];

const ALPHABETIC: [Entry; 12] = [
    e("Blanc", &[]),
    e("Bleu", &[]),
    e("Gris", &[]),
    e("Jaune", &[]),
    e("Marron", &[]),
    e("Noir", &[]),
    e("Orange", &[]),
    e("Rose", &[]),
    e("Rouge", &[]),
    e("Turquoise", &[]),
    e("Vert", &[]),
    e("Violet", &[]),
];

const FRANCE_TELECOM: [Entry; 12] = [
    e("Rouge", &["RO"]),
    e("Bleu", &["BE"]),
    e("Vert", &["VE"]),
    e("Jaune", &["JA"]),
    e("Violet", &["VI"]),
    e("Blanc", &["BC", "Incolore"]),
    e("Orange", &["OR"]),
    e("Gris", &["GR"]),
    e("Marron", &["MA"]),
    e("Noir", &["NO"]),
    e("Turquoise", &["TU"]),
    e("Rose", &["RS"]),
];

impl ColorScheme {
    pub const ALL: [ColorScheme; 3] = [
        ColorScheme::Fotag,
        ColorScheme::Alphabetic,
        ColorScheme::FranceTelecom,
    ];

    fn table(self) -> &'static [Entry; 12] {
        match self {
            ColorScheme::Fotag => &FOTAG,
            ColorScheme::Alphabetic => &ALPHABETIC,
            ColorScheme::FranceTelecom => &FRANCE_TELECOM,
        }
    }

    /// Color name for a 1-based index.
    pub fn color_of(self, index: u32) -> Result<&'static str, LabelError> {
        if !(1..=12).contains(&index) {
            return Err(LabelError::Range { index });
        }
        Ok(self.table()[index as usize - 1].name)
    }

    /// 1-based index of a color name, abbreviation or alias (case-insensitive).
    pub fn index_of(self, name: &str) -> Result<u32, LabelError> {
        let wanted = name.trim();
        self.table()
            .iter()
            .position(|entry| {
                entry.name.eq_ignore_ascii_case(wanted)
                    || entry.aliases.iter().any(|a| a.eq_ignore_ascii_case(wanted))
            })
            .map(|i| i as u32 + 1)
            .ok_or_else(|| LabelError::UnknownColor {
                scheme: self,
                name: name.to_string(),
            })
    }
}

impl fmt::Display for ColorScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColorScheme::Fotag => "fotag",
            ColorScheme::Alphabetic => "alphabetic",
            ColorScheme::FranceTelecom => "francetelecom",
        })
    }
}

impl FromStr for ColorScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fotag" => Ok(ColorScheme::Fotag),
            "alphabetic" => Ok(ColorScheme::Alphabetic),
            "francetelecom" => Ok(ColorScheme::FranceTelecom),
            other => Err(format!("unknown color scheme '{other}'")),
        }
    }
}
