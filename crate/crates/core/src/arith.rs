//! Two's-complement integer semantics shared by the folder and the interpreter.
//!
//! Integers are carried as `i64`. An `i1` holds 0 or 1, an `i32` holds its
//! sign-extended value, an `i64` holds itself.

use crate::frontend::ast::{BinOp, CmpPred, ExtKind, IntWidth};

/// Canonical representation of `value` at `width`.
pub fn wrap(width: IntWidth, value: i64) -> i64 {
    match width {
        IntWidth::I1 => value & 1,
        IntWidth::I32 => value as i32 as i64,
        IntWidth::I64 => value,
    }
}

/// Signed interpretation of a canonical value.
pub fn as_signed(width: IntWidth, value: i64) -> i64 {
    match width {
        IntWidth::I1 => -(value & 1),
        _ => wrap(width, value),
    }
}

/// Unsigned interpretation of a canonical value.
pub fn as_unsigned(width: IntWidth, value: i64) -> u64 {
    match width {
        IntWidth::I1 => (value & 1) as u64,
        IntWidth::I32 => value as u32 as u64,
        IntWidth::I64 => value as u64,
    }
}

pub fn eval_binop(op: BinOp, width: IntWidth, lhs: i64, rhs: i64) -> i64 {
    let raw = match op {
        BinOp::Add => lhs.wrapping_add(rhs),
        BinOp::Sub => lhs.wrapping_sub(rhs),
        BinOp::Mul => lhs.wrapping_mul(rhs),
        BinOp::And => lhs & rhs,
        BinOp::Or => lhs | rhs,
        BinOp::Xor => lhs ^ rhs,
    };
    wrap(width, raw)
}

pub fn eval_icmp(pred: CmpPred, width: IntWidth, lhs: i64, rhs: i64) -> bool {
    let (a, b) = (as_signed(width, lhs), as_signed(width, rhs));
    match pred {
        CmpPred::Eq => a == b,
        CmpPred::Ne => a != b,
        CmpPred::Slt => a < b,
        CmpPred::Sle => a <= b,
        CmpPred::Sgt => a > b,
        CmpPred::Sge => a >= b,
    }
}

pub fn eval_ext(kind: ExtKind, from: IntWidth, to: IntWidth, value: i64) -> i64 {
    match kind {
        ExtKind::Zext => wrap(to, as_unsigned(from, value) as i64),
        ExtKind::Sext => wrap(to, as_signed(from, value)),
        ExtKind::Trunc => wrap(to, value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i32_wraps_on_overflow() {
        assert_eq!(eval_binop(BinOp::Add, IntWidth::I32, i32::MAX as i64, 1), i32::MIN as i64);
        assert_eq!(eval_binop(BinOp::Mul, IntWidth::I32, 1 << 20, 1 << 12), 0);
    }

    #[test]
    fn i1_compares_signed() {
        // true is -1 as a signed i1
        assert!(eval_icmp(CmpPred::Slt, IntWidth::I1, 1, 0));
        assert!(eval_icmp(CmpPred::Eq, IntWidth::I1, 1, 1));
    }

    #[test]
    fn extensions() {
        assert_eq!(eval_ext(ExtKind::Sext, IntWidth::I32, IntWidth::I64, -1), -1);
        assert_eq!(eval_ext(ExtKind::Zext, IntWidth::I32, IntWidth::I64, -1), u32::MAX as i64);
        assert_eq!(eval_ext(ExtKind::Zext, IntWidth::I1, IntWidth::I32, 1), 1);
        assert_eq!(eval_ext(ExtKind::Sext, IntWidth::I1, IntWidth::I64, 1), -1);
        assert_eq!(eval_ext(ExtKind::Trunc, IntWidth::I64, IntWidth::I1, 3), 1);
        assert_eq!(eval_ext(ExtKind::Trunc, IntWidth::I64, IntWidth::I32, 1 << 32), 0);
    }
}
