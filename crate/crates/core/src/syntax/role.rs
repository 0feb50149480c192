use std::fmt;
use std::sync::Arc;

/// A role name, optionally inverted.
///
/// There is no way to build `R⁻⁻`: [`Role::inverse`] on an inverted role
/// yields the plain name again.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    name: Arc<str>,
    inverted: bool,
}

impl Role {
    pub fn named(name: impl Into<Arc<str>>) -> Self {
        Role {
            name: name.into(),
            inverted: false,
        }
    }

    pub fn inverse_of(name: impl Into<Arc<str>>) -> Self {
        Role {
            name: name.into(),
            inverted: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn name_arc(&self) -> &Arc<str> {
        &self.name
    }

    pub fn is_inverse(&self) -> bool {
        self.inverted
    }

    pub fn inverse(&self) -> Role {
        Role {
            name: self.name.clone(),
            inverted: !self.inverted,
        }
    }

    /// The role with the inverse marker stripped.
    pub fn base(&self) -> Role {
        Role::named(self.name.clone())
    }
}

/// `Inv(r)`.
pub fn inv(r: &Role) -> Role {
    r.inverse()
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}⁻", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "(inv {})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_is_an_involution() {
        let r = Role::named("R");
        assert_eq!(inv(&r), Role::inverse_of("R"));
        assert_eq!(inv(&Role::inverse_of("R")), r);
        let f = Role::named("F");
        assert_eq!(inv(&inv(&f)), f);
    }

    #[test]
    fn display_uses_sexpr_form() {
        assert_eq!(Role::inverse_of("F").to_string(), "(inv F)");
        assert_eq!(format!("{:?}", Role::inverse_of("F")), "F⁻");
    }
}
