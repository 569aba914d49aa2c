//! Classification of a module into the QIR profile it fits.

use std::collections::BTreeSet;
use std::fmt;

use super::ast::*;
use crate::intrinsics::{Intrinsic, ParamRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Straight-line, statically addressed, trailing measurements.
    Base,
    /// Uses only the supported classical subset around intrinsic calls.
    AdaptiveSubset,
    Unsupported,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Base => "base",
            Profile::AdaptiveSubset => "adaptive-subset",
            Profile::Unsupported => "unsupported",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileReport {
    pub profile: Profile,
    /// Constructs outside the supported subset. Empty unless `Unsupported`.
    pub violations: Vec<Violation>,
    /// Reasons the module is not base profile. Empty when `Base`.
    pub base_violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

pub fn validate_profile(module: &QirModule) -> ProfileReport {
    let violations = adaptive_violations(module);
    let base_violations = base_violations(module);
    let profile = if !violations.is_empty() {
        Profile::Unsupported
    } else if base_violations.is_empty() {
        Profile::Base
    } else {
        Profile::AdaptiveSubset
    };
    let mut warnings = Vec::new();
    if profile == Profile::Base {
        let (used, measured) = qubit_coverage(module);
        let missing: Vec<String> = used.difference(&measured).map(u64::to_string).collect();
        if !missing.is_empty() {
            warnings.push(format!("qubits {} are never measured", missing.join(", ")));
        }
    }
    ProfileReport { profile, violations, base_violations, warnings }
}

fn loc(block: &BasicBlock, index: usize) -> Location {
    Location { block: block.label.clone(), index: Some(index) }
}

/// Checks shared by every profile the toolkit accepts.
pub fn adaptive_violations(module: &QirModule) -> Vec<Violation> {
    let mut out = Vec::new();
    if module.entry.ret_ty != Type::Void && !matches!(module.entry.ret_ty, Type::Int(_)) {
        out.push(Violation {
            location: Location { block: module.entry.blocks[0].label.clone(), index: None },
            reason: format!("entry point returns `{}`", module.entry.ret_ty),
        });
    }
    for block in &module.entry.blocks {
        for (i, inst) in block.instructions.iter().enumerate() {
            let Instruction::Call { ret_ty, callee, args, .. } = inst else {
                for v in inst.operands() {
                    if let Value::Global(g) = v {
                        out.push(Violation { location: loc(block, i), reason: format!("global `@{g}` used as data") });
                    }
                }
                continue;
            };
            let Some(intrinsic) = Intrinsic::lookup(callee) else {
                let reason = if module.is_defined(callee) {
                    format!("call to defined function `@{callee}` (function calls are not supported)")
                } else {
                    format!("call to `@{callee}`, which is not a known intrinsic")
                };
                out.push(Violation { location: loc(block, i), reason });
                continue;
            };
            let roles = intrinsic.params();
            if roles.len() != args.len() {
                out.push(Violation {
                    location: loc(block, i),
                    reason: format!("`@{callee}` takes {} arguments, got {}", roles.len(), args.len()),
                });
                continue;
            }
            for (role, arg) in roles.iter().zip(args) {
                if arg.ty != role.ty() {
                    out.push(Violation {
                        location: loc(block, i),
                        reason: format!("`@{callee}` expects `{}` arguments where `{}` was given", role.ty(), arg.ty),
                    });
                }
                if matches!(arg.value, Value::Global(_)) && *role != ParamRole::Label {
                    out.push(Violation {
                        location: loc(block, i),
                        reason: format!("global passed to a non-label parameter of `@{callee}`"),
                    });
                }
            }
            if *ret_ty != intrinsic.returns().ty() {
                out.push(Violation {
                    location: loc(block, i),
                    reason: format!("`@{callee}` returns `{}`, not `{ret_ty}`", intrinsic.returns().ty()),
                });
            }
        }
    }
    out
}

/// Reasons the module is not a straight-line base-profile program.
pub fn base_violations(module: &QirModule) -> Vec<Violation> {
    let mut out = Vec::new();
    let entry = &module.entry;
    for extra in entry.blocks.iter().skip(1) {
        out.push(Violation {
            location: Location { block: extra.label.clone(), index: None },
            reason: "control flow: additional basic block".to_string(),
        });
    }
    for block in &entry.blocks {
        if !block.phis.is_empty() {
            out.push(Violation {
                location: Location { block: block.label.clone(), index: Some(0) },
                reason: "phi node".to_string(),
            });
        }
        if !matches!(block.terminator, Terminator::Ret(_)) {
            out.push(Violation {
                location: Location { block: block.label.clone(), index: None },
                reason: "branch terminator".to_string(),
            });
        }
    }
    let mut measured = false;
    let mut recorded = false;
    for block in &entry.blocks {
        for (i, inst) in block.instructions.iter().enumerate() {
            let Instruction::Call { result, callee, args, .. } = inst else {
                out.push(Violation { location: loc(block, i), reason: "classical instruction".to_string() });
                continue;
            };
            if result.is_some() {
                out.push(Violation { location: loc(block, i), reason: "call producing a value".to_string() });
            }
            if args.iter().any(|a| matches!(a.value, Value::Local(_))) {
                out.push(Violation { location: loc(block, i), reason: "dynamic operand".to_string() });
            }
            match Intrinsic::lookup(callee) {
                Some(Intrinsic::Measure) => {
                    if recorded {
                        out.push(Violation {
                            location: loc(block, i),
                            reason: "measurement after output recording".to_string(),
                        });
                    }
                    measured = true;
                }
                Some(Intrinsic::Gate(_) | Intrinsic::Reset) if measured => out.push(Violation {
                    location: loc(block, i),
                    reason: "quantum operation after a measurement".to_string(),
                }),
                Some(i) if i.is_output_recording() => recorded = true,
                Some(Intrinsic::Gate(_) | Intrinsic::Reset) => {}
                Some(other) => out.push(Violation {
                    location: loc(block, i),
                    reason: format!("runtime function `{}` is not allowed", other.symbol()),
                }),
                None => {}
            }
        }
    }
    out
}

fn qubit_coverage(module: &QirModule) -> (BTreeSet<u64>, BTreeSet<u64>) {
    let mut used = BTreeSet::new();
    let mut measured = BTreeSet::new();
    for (callee, args) in module.entry_calls() {
        let Some(intrinsic) = Intrinsic::lookup(callee) else { continue };
        for (role, arg) in intrinsic.params().iter().zip(args) {
            if let (ParamRole::Qubit, Some(q)) = (role, arg.value.static_index()) {
                used.insert(q);
                if intrinsic == Intrinsic::Measure {
                    measured.insert(q);
                }
            }
        }
    }
    (used, measured)
}
