use std::fmt;

/// Element codes double as the binary record's element byte (atomic number,
/// 0 for anything outside the supported set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    H,
    B,
    C,
    N,
    O,
    F,
    P,
    S,
    Cl,
    Br,
    I,
    Other,
}

/// Interaction class used by the pairwise contact score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactClass {
    Hydrophobic,
    Polar,
    Other,
}

impl Element {
    pub const ALL: [Element; 12] = [
        Element::H,
        Element::B,
        Element::C,
        Element::N,
        Element::O,
        Element::F,
        Element::P,
        Element::S,
        Element::Cl,
        Element::Br,
        Element::I,
        Element::Other,
    ];

    pub fn code(self) -> u8 {
        match self {
            Element::H => 1,
            Element::B => 5,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::F => 9,
            Element::P => 15,
            Element::S => 16,
            Element::Cl => 17,
            Element::Br => 35,
            Element::I => 53,
            Element::Other => 0,
        }
    }

    pub fn from_code(code: u8) -> Option<Element> {
        Element::ALL.iter().copied().find(|e| e.code() == code)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Element::H => "H",
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
            Element::Other => "Du",
        }
    }

    /// Inverse of [`Element::symbol`]; unknown symbols map to `Other`.
    pub fn from_symbol(symbol: &str) -> Element {
        Element::ALL
            .iter()
            .copied()
            .find(|e| e.symbol().eq_ignore_ascii_case(symbol))
            .unwrap_or(Element::Other)
    }

    /// Allowed valences in ascending order (organic-subset convention).
    pub fn valences(self) -> &'static [u32] {
        match self {
            Element::H => &[1],
            Element::B => &[3],
            Element::C => &[4],
            Element::N => &[3, 5],
            Element::O => &[2],
            Element::P => &[3, 5],
            Element::S => &[2, 4, 6],
            Element::F | Element::Cl | Element::Br | Element::I => &[1],
            Element::Other => &[],
        }
    }

    pub fn contact_class(self) -> ContactClass {
        match self {
            Element::C => ContactClass::Hydrophobic,
            Element::N | Element::O => ContactClass::Polar,
            _ => ContactClass::Other,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_unique_and_round_trip() {
        for e in Element::ALL {
            assert_eq!(Element::from_code(e.code()), Some(e));
            assert_eq!(Element::from_symbol(e.symbol()), e);
        }
        assert_eq!(Element::from_code(2), None);
    }
}
