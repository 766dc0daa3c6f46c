use std::fmt;

/// A cell value in a sentential form: the blank background symbol, a
/// terminal, or a nonterminal. The blank is a distinct kind and never
/// compares equal to a named symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Blank,
    Terminal(char),
    Nonterminal(char),
}

impl Symbol {
    pub fn is_blank(self) -> bool {
        matches!(self, Symbol::Blank)
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }

    pub fn is_nonterminal(self) -> bool {
        matches!(self, Symbol::Nonterminal(_))
    }

    /// The symbol's character name, if it has one.
    pub fn name(self) -> Option<char> {
        match self {
            Symbol::Blank => None,
            Symbol::Terminal(c) | Symbol::Nonterminal(c) => Some(c),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Blank => write!(f, "#"),
            Symbol::Terminal(c) | Symbol::Nonterminal(c) => write!(f, "{c}"),
        }
    }
}
