//! Text format for models, and Graphviz output for trees.
//!
//! ```text
//! domain Person = 4;            # objects person1..person4
//! domain Drink = {beer, wine}
//! pred Smokes(Person)
//! pred Color(Person) : {red, green, blue}
//! parfactor Smokes(X), Smokes(Y) | X != Y with table [2, 1, 1, 3];
//! ```
//!
//! An argument is an object when it is declared in that position's domain
//! and a logvar otherwise. Ranges default to `{true, false}` in that order.

mod dot;
mod parse;
mod write;

pub use dot::tree_dot;
pub use parse::parse_model;
pub use write::write_model;
