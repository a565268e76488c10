//! Exact incidence counting between Cartesian point sets `A × A ⊂ F_p²` and
//! translates of the hyperbola `xy = λ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: residues mod an odd prime below 2^61,
//! * [`moebius`]: translates as SL₂ matrices, the projective-line action and
//!   the closed-form products `h₁h₂⁻¹`, `h₁h₂⁻¹h₃`,
//! * [`sets`]: scalar and translate sets plus the set-spec language,
//! * [`counts`]: the counting kernels (σ, energies, T₃, T₄, Q, rich curves, …),
//! * [`oracle`]: deliberately naive brute-force references for the kernels,
//! * [`bounds`]: evaluators for the incidence and energy bounds, and the
//!   [`BoundReport`](bounds::BoundReport) record used by the CLI.
//!
//! The guide under `book/` walks through the same material with runnable
//! snippets; those snippets are compiled as doctests of this crate.
//!
//! ```
//! use hyperlab::prelude::*;
//!
//! let p = check_prime(7)?;
//! let a = ScalarSet::new(p, [1, 6]);
//! let h = TranslateSet::new(p, [(0, 0)]);
//! // (1, -1) and (-1, 1) both lie on xy = -1.
//! assert_eq!(sigma(&a, &h, &Lambda::standard(p)), 2);
//! # Ok::<(), hyperlab::Error>(())
//! ```

pub mod bounds;
pub mod counts;
mod error;
pub mod field;
pub mod moebius;
pub mod oracle;
pub mod sets;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bounds::{BoundReport, Exactness, Quantity};
    pub use crate::counts::*;
    pub use crate::field::{check_prime, FieldElement, PrimeModulus};
    pub use crate::moebius::{Lambda, MoebiusMap, ProjectiveValue, Translate};
    pub use crate::sets::{parse_scalars, parse_translates, ScalarSet, SpecContext, TranslateSet};
    pub use crate::{Error, Result};
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/field.md")]
    mod field {}
    #[doc = include_str!("../../../book/src/moebius.md")]
    mod moebius {}
    #[doc = include_str!("../../../book/src/sets.md")]
    mod sets {}
    #[doc = include_str!("../../../book/src/incidences.md")]
    mod incidences {}
    #[doc = include_str!("../../../book/src/energies.md")]
    mod energies {}
    #[doc = include_str!("../../../book/src/rich.md")]
    mod rich {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
}
