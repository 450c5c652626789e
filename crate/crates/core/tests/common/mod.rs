#![allow(dead_code)]

use subop_core::ClassTable;

pub const ONE_CLASS: &str = "class C<T> extends Object {}";
pub const TWO_CLASS: &str = "class C<T> extends Object {}\nclass D<T> extends Object {}";
pub const CHAIN: &str =
    "class A extends Object {}\nclass B extends A {}\nclass C<T> extends Object {}";

pub fn table(src: &str) -> ClassTable {
    ClassTable::parse(src).unwrap()
}

/// The tables every property is checked on, with a label.
pub fn test_tables() -> Vec<(&'static str, ClassTable)> {
    vec![
        ("empty", table("")),
        ("one generic", table(ONE_CLASS)),
        ("two generics", table(TWO_CLASS)),
        ("one generic + chain", table(CHAIN)),
    ]
}
