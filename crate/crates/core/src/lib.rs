//! Finite Boolean-valued models of set theory.
//!
//! Names over a finite Boolean algebra, their Boolean truth values, quotients
//! by ultrafilters, regular open completions of finite posets, Cohen posets
//! and the forcing relation. The `oracle` module holds naive reference
//! implementations used for cross-checking.

pub mod algebra;
pub mod cli;
pub mod forcing;
pub mod lang;
pub mod names;
pub mod oracle;
pub mod order;
pub mod quotient;
pub mod valuation;
