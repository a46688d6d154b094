// Each chapter of the guide becomes a module so that its code blocks run as
// doc-tests. The command-line chapter is checked by the CLI crate.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/matrices.md")]
mod matrices {}
#[doc = include_str!("../../../book/src/observables.md")]
mod observables {}
#[doc = include_str!("../../../book/src/measurement.md")]
mod measurement {}
#[doc = include_str!("../../../book/src/simulation.md")]
mod simulation {}
#[doc = include_str!("../../../book/src/closed-forms.md")]
mod closed_forms {}
#[doc = include_str!("../../../book/src/certificate.md")]
mod certificate {}
#[doc = include_str!("../../../README.md")]
mod readme {}
