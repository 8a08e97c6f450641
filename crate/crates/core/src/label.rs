use std::fmt;

/// Ground truth of a sample, and the classifier's verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Genuine,
    Forgery,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Genuine => "GENUINE",
            Label::Forgery => "FORGERY",
        }
    }

    /// Training target: +1 genuine, −1 forgery.
    pub fn target(self) -> f64 {
        match self {
            Label::Genuine => 1.0,
            Label::Forgery => -1.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
