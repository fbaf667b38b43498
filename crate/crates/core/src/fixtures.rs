//! Reference designs used throughout the documentation, tests and CLI
//! examples.

use crate::design::{Coding, Design};

/// The eight-run orthogonal array L8(2^7) with `x3 = -x1x2`, `x5 = -x1x4`,
/// `x6 = -x2x4`, `x7 = x1x2x4`, in its usual run order.
pub fn l8_table() -> Vec<Vec<i32>> {
    vec![
        vec![-1, -1, -1, -1, -1, -1, -1],
        vec![-1, -1, -1, 1, 1, 1, 1],
        vec![-1, 1, 1, -1, -1, 1, 1],
        vec![-1, 1, 1, 1, 1, -1, -1],
        vec![1, -1, 1, -1, 1, -1, 1],
        vec![1, -1, 1, 1, -1, 1, -1],
        vec![1, 1, -1, -1, 1, 1, -1],
        vec![1, 1, -1, 1, -1, -1, 1],
    ]
}

pub fn l8() -> Design {
    Design::from_signs(&l8_table()).expect("valid fixture")
}

/// Reduced lex basis (`x1 > ... > x7`) of the L8 design ideal.
pub const L8_GB_LEX: [&str; 7] = [
    "x7^2 - 1",
    "x6^2 - 1",
    "x5^2 - 1",
    "x3 + x5*x6",
    "x2 + x5*x7",
    "x1 + x6*x7",
    "x4 - x5*x6*x7",
];

/// Reduced grevlex basis of the L8 design ideal.
pub const L8_GB_GREVLEX: [&str; 28] = [
    "x7^2 - 1",
    "x6^2 - 1",
    "x5^2 - 1",
    "x4^2 - 1",
    "x3^2 - 1",
    "x2^2 - 1",
    "x1^2 - 1",
    "x2*x3 + x1",
    "x4*x5 + x1",
    "x6*x7 + x1",
    "x1*x3 + x2",
    "x4*x6 + x2",
    "x5*x7 + x2",
    "x1*x2 + x3",
    "x4*x7 + x3",
    "x5*x6 + x3",
    "x1*x5 + x4",
    "x2*x6 + x4",
    "x3*x7 + x4",
    "x1*x4 + x5",
    "x2*x7 + x5",
    "x3*x6 + x5",
    "x1*x7 + x6",
    "x2*x4 + x6",
    "x3*x5 + x6",
    "x1*x6 + x7",
    "x2*x5 + x7",
    "x3*x4 + x7",
];

/// Regular half fraction `x1x2x3 = 1`.
pub fn f1() -> Design {
    Design::from_signs(&[vec![1, 1, 1], vec![1, -1, -1], vec![-1, 1, -1], vec![-1, -1, 1]]).unwrap()
}

/// Three runs of `f1`.
pub fn f2() -> Design {
    Design::from_signs(&[vec![1, 1, 1], vec![1, -1, -1], vec![-1, 1, -1]]).unwrap()
}

/// Four runs contained in no regular fraction.
pub fn f3() -> Design {
    Design::from_signs(&[vec![1, 1, 1], vec![1, 1, -1], vec![1, -1, 1], vec![-1, 1, 1]]).unwrap()
}

/// Sixteen-run 2^{7-3} design with `x1x2x4x5 = x1x3x4x6 = x2x3x4x7 = 1`.
pub fn design_2_7_3_table() -> Vec<Vec<i32>> {
    vec![
        vec![1, 1, 1, 1, 1, 1, 1],
        vec![1, 1, 1, -1, -1, -1, -1],
        vec![1, 1, -1, 1, 1, -1, -1],
        vec![1, 1, -1, -1, -1, 1, 1],
        vec![1, -1, 1, 1, -1, 1, -1],
        vec![1, -1, 1, -1, 1, -1, 1],
        vec![1, -1, -1, 1, -1, -1, 1],
        vec![1, -1, -1, -1, 1, 1, -1],
        vec![-1, 1, 1, 1, -1, -1, 1],
        vec![-1, 1, 1, -1, 1, 1, -1],
        vec![-1, 1, -1, 1, -1, 1, -1],
        vec![-1, 1, -1, -1, 1, -1, 1],
        vec![-1, -1, 1, 1, 1, -1, -1],
        vec![-1, -1, 1, -1, -1, 1, 1],
        vec![-1, -1, -1, 1, 1, 1, 1],
        vec![-1, -1, -1, -1, -1, -1, -1],
    ]
}

pub fn design_2_7_3() -> Design {
    Design::from_signs(&design_2_7_3_table()).unwrap()
}

/// Nine-run 3^{3-1} design in integer level coding.
pub fn design_3_3_1_levels() -> Vec<Vec<u32>> {
    vec![
        vec![0, 0, 0],
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 1, 1],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
        vec![2, 2, 2],
    ]
}

pub fn design_3_3_1(coding: Coding) -> Design {
    Design::new(3, 3, coding, design_3_3_1_levels()).unwrap()
}

/// The 2^2 full factorial in run order `++, +-, -+, --`.
pub fn full_2x2() -> Design {
    Design::full_factorial(2)
}
