//! One state, one observation, two environments with opposite rewards.
//! Only a coin flip between the two actions guarantees 0; every
//! deterministic policy loses 1 in one of the environments.

use crate::model::{Belief, Environment, Horizon, MePomdp, Spaces};

pub fn pennies_fixture() -> MePomdp {
    let spaces = Spaces::new(vec!["s".into()], vec!["a1".into(), "a2".into()], vec!["z".into()]);
    let envs = [1.0, -1.0]
        .into_iter()
        .map(|sign| {
            Environment::tabulate(
                &spaces,
                |_, _| vec![(0, 1.0)],
                |_, _| vec![(0, 1.0)],
                move |_, a| if a == 0 { sign } else { -sign },
                Belief::point(1, 0),
            )
        })
        .collect();
    MePomdp::new(spaces, envs, 1.0, Horizon::Finite(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Validate;

    #[test]
    fn shape() {
        let m = pennies_fixture();
        assert!(m.validate().is_empty());
        assert!(m.is_po_memdp());
        assert_eq!(m.envs[1].reward, vec![-1.0, 1.0]);
    }
}
