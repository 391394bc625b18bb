//! Fairness analysis of trace-closed DFA specifications and synthesis of
//! equivalent asynchronous automata.

pub mod aa;
pub mod alphabet;
pub mod dfa;
pub mod fixtures;
pub mod synthesis;
pub mod traces;
pub mod treeofbags;
