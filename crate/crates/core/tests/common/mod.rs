//! Oracles and random-instance generators shared by the integration suites.
#![allow(dead_code)]

use std::fmt::Write as _;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use qir_toolkit::circuit::{CircuitOp, GateKind, QuantumCircuit};

// ---------------------------------------------------------------------------
// Dense matrix oracle. Matrices are built from scratch from Pauli literals
// and projectors, independently of the simulator's gate table.

#[derive(Clone, Debug)]
pub struct Dense {
    pub dim: usize,
    pub data: Vec<C>,
}

impl Dense {
    pub fn identity(dim: usize) -> Dense {
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C::new(1.0, 0.0);
        }
        Dense { dim, data }
    }

    pub fn from2(m: [[C; 2]; 2]) -> Dense {
        Dense { dim: 2, data: vec![m[0][0], m[0][1], m[1][0], m[1][1]] }
    }

    pub fn at(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    pub fn kron(&self, other: &Dense) -> Dense {
        let dim = self.dim * other.dim;
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.at(r1, c1);
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        data[(r1 * other.dim + r2) * dim + c1 * other.dim + c2] = a * other.at(r2, c2);
                    }
                }
            }
        }
        Dense { dim, data }
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        let d = self.dim;
        let mut data = vec![C::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.at(r, k);
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    data[r * d + c] += a * other.at(k, c);
                }
            }
        }
        Dense { dim: d, data }
    }

    pub fn add(&self, other: &Dense) -> Dense {
        Dense { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: C) -> Dense {
        Dense { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn column(&self, c: usize) -> Vec<C> {
        (0..self.dim).map(|r| self.at(r, c)).collect()
    }
}

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn pauli_i() -> [[C; 2]; 2] {
    [[re(1.0), re(0.0)], [re(0.0), re(1.0)]]
}
pub fn pauli_x() -> [[C; 2]; 2] {
    [[re(0.0), re(1.0)], [re(1.0), re(0.0)]]
}
pub fn pauli_y() -> [[C; 2]; 2] {
    [[re(0.0), C::new(0.0, -1.0)], [C::new(0.0, 1.0), re(0.0)]]
}
pub fn pauli_z() -> [[C; 2]; 2] {
    [[re(1.0), re(0.0)], [re(0.0), re(-1.0)]]
}
fn proj0() -> [[C; 2]; 2] {
    [[re(1.0), re(0.0)], [re(0.0), re(0.0)]]
}
fn proj1() -> [[C; 2]; 2] {
    [[re(0.0), re(0.0)], [re(0.0), re(1.0)]]
}

fn lin(a: C, m: [[C; 2]; 2], b: C, n: [[C; 2]; 2]) -> [[C; 2]; 2] {
    let mut out = [[re(0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a * m[r][c] + b * n[r][c];
        }
    }
    out
}

/// Single-qubit unitaries written as combinations of Paulis:
/// R_P(θ) = cos(θ/2)·I − i·sin(θ/2)·P, H = (X + Z)/√2.
pub fn one_qubit(kind: GateKind, theta: f64) -> [[C; 2]; 2] {
    let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let r2 = 1.0 / 2f64.sqrt();
    match kind {
        GateKind::H => lin(re(r2), pauli_x(), re(r2), pauli_z()),
        GateKind::X => pauli_x(),
        GateKind::Y => pauli_y(),
        GateKind::Z => pauli_z(),
        GateKind::S => lin(re(1.0), proj0(), C::new(0.0, 1.0), proj1()),
        GateKind::Sdg => lin(re(1.0), proj0(), C::new(0.0, -1.0), proj1()),
        GateKind::T => lin(re(1.0), proj0(), C::new(r2, r2), proj1()),
        GateKind::Tdg => lin(re(1.0), proj0(), C::new(r2, -r2), proj1()),
        GateKind::Rx => lin(re(c), pauli_i(), C::new(0.0, -s), pauli_x()),
        GateKind::Ry => lin(re(c), pauli_i(), C::new(0.0, -s), pauli_y()),
        GateKind::Rz => lin(re(c), pauli_i(), C::new(0.0, -s), pauli_z()),
        other => panic!("{other:?} is not a single-qubit gate"),
    }
}

/// ⊗ over qubits n−1 … 0 with the given factors and identity elsewhere
/// (qubit 0 is the least significant index bit).
pub fn operator_on(n: usize, factors: &[(usize, [[C; 2]; 2])]) -> Dense {
    let mut m = Dense::identity(1);
    for q in (0..n).rev() {
        let f = factors.iter().find(|(fq, _)| *fq == q).map_or(pauli_i(), |(_, f)| *f);
        m = m.kron(&Dense::from2(f));
    }
    m
}

pub fn gate_operator(n: usize, kind: GateKind, params: &[f64], qubits: &[usize]) -> Dense {
    let theta = params.first().copied().unwrap_or(0.0);
    match kind {
        GateKind::Cnot => operator_on(n, &[(qubits[0], proj0())])
            .add(&operator_on(n, &[(qubits[0], proj1()), (qubits[1], pauli_x())])),
        GateKind::Cz => operator_on(n, &[(qubits[0], proj0())])
            .add(&operator_on(n, &[(qubits[0], proj1()), (qubits[1], pauli_z())])),
        GateKind::Ccx => {
            let both = operator_on(n, &[(qubits[0], proj1()), (qubits[1], proj1())]);
            Dense::identity(1 << n)
                .add(&both.scale(re(-1.0)))
                .add(&operator_on(n, &[(qubits[0], proj1()), (qubits[1], proj1()), (qubits[2], pauli_x())]))
        }
        GateKind::Swap => {
            let (a, b) = (qubits[0], qubits[1]);
            Dense::identity(1 << n)
                .add(&operator_on(n, &[(a, pauli_x()), (b, pauli_x())]))
                .add(&operator_on(n, &[(a, pauli_y()), (b, pauli_y())]))
                .add(&operator_on(n, &[(a, pauli_z()), (b, pauli_z())]))
                .scale(re(0.5))
        }
        single => operator_on(n, &[(qubits[0], one_qubit(single, theta))]),
    }
}

/// State after the unitary prefix of `circuit` (ops up to the first
/// measurement or reset), from the product of full 2^n × 2^n matrices.
pub fn oracle_state(circuit: &QuantumCircuit) -> Vec<C> {
    let n = circuit.num_qubits;
    let mut u = Dense::identity(1 << n);
    for op in &circuit.ops {
        match op {
            CircuitOp::Gate { kind, params, qubits } => u = gate_operator(n, *kind, params, qubits).mul(&u),
            _ => break,
        }
    }
    u.column(0)
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Random instances. Generators consume a stream of raw choices so that the
// same code serves proptest and the fixed-seed acceptance samples.

#[derive(Clone, Debug)]
pub struct Choices {
    data: Vec<u32>,
    pos: usize,
}

impl Choices {
    pub fn below(&mut self, n: u32) -> u32 {
        let v = self.data[self.pos % self.data.len()];
        self.pos += 1;
        if self.pos.is_multiple_of(self.data.len()) {
            // Stream exhausted: vary the values on wrap-around.
            for x in &mut self.data {
                *x = x.wrapping_mul(2_654_435_761).wrapping_add(1);
            }
        }
        v % n.max(1)
    }

    pub fn range(&mut self, lo: u32, hi_inclusive: u32) -> u32 {
        lo + self.below(hi_inclusive - lo + 1)
    }

    pub fn flag(&mut self) -> bool {
        self.below(2) == 1
    }

    pub fn angle(&mut self) -> f64 {
        (self.below(1 << 20) as f64 / (1 << 20) as f64 - 0.5) * 4.0 * std::f64::consts::PI
    }

    pub fn distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        (0..k).map(|_| pool.remove(self.below(pool.len() as u32) as usize)).collect()
    }
}

pub fn choices() -> impl Strategy<Value = Choices> {
    prop::collection::vec(any::<u32>(), 256).prop_map(|data| Choices { data, pos: 0 })
}

/// `count` instances from a fixed-seed runner.
pub fn samples<T>(count: usize, mut make: impl FnMut(&mut Choices) -> T) -> Vec<T> {
    let mut runner = TestRunner::deterministic();
    let strategy = choices();
    (0..count).map(|_| make(&mut strategy.new_tree(&mut runner).unwrap().current())).collect()
}

pub fn random_gate(ch: &mut Choices, n: usize) -> CircuitOp {
    let kinds: Vec<GateKind> = GateKind::ALL.into_iter().filter(|k| k.num_qubits() <= n).collect();
    let kind = kinds[ch.below(kinds.len() as u32) as usize];
    let params = (0..kind.num_params()).map(|_| ch.angle()).collect();
    CircuitOp::Gate { kind, params, qubits: ch.distinct(n, kind.num_qubits()) }
}

/// Unitary circuit on 1..=`max_qubits` qubits with up to `max_gates` gates.
pub fn random_unitary_circuit(ch: &mut Choices, max_qubits: u32, max_gates: u32) -> QuantumCircuit {
    let n = ch.range(1, max_qubits) as usize;
    let mut c = QuantumCircuit::new(n, 0);
    for _ in 0..ch.range(0, max_gates) {
        c.ops.push(random_gate(ch, n));
    }
    c
}

/// Gates and resets followed by measurements only, so the circuit is
/// expressible in the base profile.
pub fn random_base_circuit(ch: &mut Choices, max_qubits: u32, max_ops: u32) -> QuantumCircuit {
    let n = ch.range(0, max_qubits) as usize;
    let m = ch.range(0, max_qubits) as usize;
    let mut c = QuantumCircuit::new(n, m);
    let total = ch.range(0, max_ops);
    let measures = if n > 0 && m > 0 { ch.range(0, total) } else { 0 };
    for _ in measures..total {
        if n == 0 {
            break;
        }
        if ch.below(8) == 0 {
            c.ops.push(CircuitOp::Reset { qubit: ch.below(n as u32) as usize });
        } else {
            c.ops.push(random_gate(ch, n));
        }
    }
    for _ in 0..measures {
        c.ops.push(CircuitOp::Measure { qubit: ch.below(n as u32) as usize, clbit: ch.below(m as u32) as usize });
    }
    c
}

/// Any mix of gates, measurements and resets.
pub fn random_circuit(ch: &mut Choices, max_qubits: u32, max_ops: u32) -> QuantumCircuit {
    let n = ch.range(0, max_qubits) as usize;
    let m = ch.range(0, max_qubits) as usize;
    let mut c = QuantumCircuit::new(n, m);
    if n == 0 {
        return c;
    }
    for _ in 0..ch.range(0, max_ops) {
        match ch.below(6) {
            0 if m > 0 => c.ops.push(CircuitOp::Measure { qubit: ch.below(n as u32) as usize, clbit: ch.below(m as u32) as usize }),
            1 => c.ops.push(CircuitOp::Reset { qubit: ch.below(n as u32) as usize }),
            _ => c.ops.push(random_gate(ch, n)),
        }
    }
    c
}

// ---------------------------------------------------------------------------
// Random adaptive-subset programs (text). Loops have constant bounds and no
// branch depends on a measurement.

const ONE_QUBIT: [&str; 8] = ["h", "x", "y", "z", "s", "s_adj", "t", "t_adj"];
const ROTATIONS: [&str; 3] = ["rx", "ry", "rz"];

pub struct ProgramShape {
    pub text: String,
    pub num_qubits: usize,
    pub dynamic: bool,
}

struct Gen<'a> {
    ch: &'a mut Choices,
    body: String,
    tmp: usize,
    prev: String,
    nq: usize,
    /// `%name` holding the allocated array, if qubits are dynamic.
    array: Option<String>,
}

impl Gen<'_> {
    fn fresh(&mut self, stem: &str) -> String {
        self.tmp += 1;
        format!("{stem}{}", self.tmp)
    }

    /// Emits code yielding a qubit pointer for the i64 value `idx`.
    fn qubit_from(&mut self, idx: &str) -> String {
        let q = self.fresh("q");
        match &self.array {
            Some(arr) => {
                let arr = arr.clone();
                writeln!(self.body, "  %{q} = call ptr @__quantum__rt__array_get_element_ptr_1d(ptr %{arr}, i64 {idx})").unwrap();
            }
            None => writeln!(self.body, "  %{q} = inttoptr i64 {idx} to ptr").unwrap(),
        }
        format!("%{q}")
    }

    fn gate_on(&mut self, targets: &[String]) {
        let pick = self.ch.below(10);
        if targets.len() >= 2 && pick < 3 {
            let name = ["cnot", "cz", "swap"][pick as usize];
            writeln!(self.body, "  call void @__quantum__qis__{name}__body(ptr {}, ptr {})", targets[0], targets[1]).unwrap();
        } else if pick < 5 {
            let name = ROTATIONS[self.ch.below(3) as usize];
            let angle = format!("{:?}", self.ch.angle());
            writeln!(self.body, "  call void @__quantum__qis__{name}__body(double {angle}, ptr {})", targets[0]).unwrap();
        } else {
            let name = ONE_QUBIT[self.ch.below(ONE_QUBIT.len() as u32) as usize];
            writeln!(self.body, "  call void @__quantum__qis__{name}__body(ptr {})", targets[0]).unwrap();
        }
    }

    fn mask(&self) -> usize {
        self.nq - 1
    }

    fn straight(&mut self) {
        for _ in 0..self.ch.range(1, 3) {
            let a = self.ch.below(self.nq as u32) as usize;
            let b = (a + 1 + self.ch.below(self.nq as u32 - 1) as usize) % self.nq;
            let qa = self.qubit_from(&a.to_string());
            let qb = self.qubit_from(&b.to_string());
            self.gate_on(&[qa, qb]);
        }
    }

    fn phi_loop(&mut self) {
        let bound = self.ch.range(0, 32);
        let (head, exit) = (self.fresh("loop"), self.fresh("after"));
        let (i, next, more) = (self.fresh("i"), self.fresh("inext"), self.fresh("more"));
        let prev = self.prev.clone();
        writeln!(self.body, "  br label %{head}\n{head}:").unwrap();
        writeln!(self.body, "  %{i} = phi i64 [ 0, %{prev} ], [ %{next}, %{head} ]").unwrap();
        let off = self.ch.below(self.nq as u32);
        let (sum, idx, idx2, sum2) = (self.fresh("s"), self.fresh("k"), self.fresh("k"), self.fresh("s"));
        writeln!(self.body, "  %{sum} = add i64 %{i}, {off}").unwrap();
        writeln!(self.body, "  %{idx} = and i64 %{sum}, {}", self.mask()).unwrap();
        writeln!(self.body, "  %{sum2} = add i64 %{sum}, 1").unwrap();
        writeln!(self.body, "  %{idx2} = and i64 %{sum2}, {}", self.mask()).unwrap();
        let qa = self.qubit_from(&format!("%{idx}"));
        let qb = self.qubit_from(&format!("%{idx2}"));
        self.gate_on(&[qa, qb]);
        writeln!(self.body, "  %{next} = add i64 %{i}, 1").unwrap();
        // Bottom-tested: the body runs once even for bound 0.
        writeln!(self.body, "  %{more} = icmp slt i64 %{next}, {bound}").unwrap();
        writeln!(self.body, "  br i1 %{more}, label %{head}, label %{exit}\n{exit}:").unwrap();
        self.prev = exit;
    }

    fn slot_loop(&mut self) {
        let bound = self.ch.range(0, 32);
        let (slot, head, body, exit) = (self.fresh("ctr"), self.fresh("hdr"), self.fresh("body"), self.fresh("done"));
        let (v, c, v2, w, ext, v3) =
            (self.fresh("v"), self.fresh("c"), self.fresh("v"), self.fresh("w"), self.fresh("x"), self.fresh("v"));
        writeln!(self.body, "  %{slot} = alloca i32").unwrap();
        writeln!(self.body, "  store i32 0, ptr %{slot}").unwrap();
        writeln!(self.body, "  br label %{head}\n{head}:").unwrap();
        writeln!(self.body, "  %{v} = load i32, ptr %{slot}").unwrap();
        writeln!(self.body, "  %{c} = icmp slt i32 %{v}, {bound}").unwrap();
        writeln!(self.body, "  br i1 %{c}, label %{body}, label %{exit}\n{body}:").unwrap();
        writeln!(self.body, "  %{v2} = load i32, ptr %{slot}").unwrap();
        writeln!(self.body, "  %{w} = and i32 %{v2}, {}", self.mask()).unwrap();
        writeln!(self.body, "  %{ext} = sext i32 %{w} to i64").unwrap();
        let q = self.qubit_from(&format!("%{ext}"));
        self.gate_on(std::slice::from_ref(&q));
        writeln!(self.body, "  %{v3} = add i32 %{v2}, 1").unwrap();
        writeln!(self.body, "  store i32 %{v3}, ptr %{slot}").unwrap();
        writeln!(self.body, "  br label %{head}\n{exit}:").unwrap();
        self.prev = exit;
    }

    fn select_gate(&mut self) {
        let (c, s) = (self.fresh("sel"), self.fresh("pick"));
        let a = self.ch.below(self.nq as u32);
        let b = self.ch.below(self.nq as u32);
        let lhs = self.ch.below(4);
        writeln!(self.body, "  %{c} = icmp sge i64 {lhs}, 2").unwrap();
        writeln!(self.body, "  %{s} = select i1 %{c}, i64 {a}, i64 {b}").unwrap();
        let q = self.qubit_from(&format!("%{s}"));
        self.gate_on(&[q]);
    }
}

/// A feedback-free adaptive-subset module over 2 or 4 qubits. Qubits are
/// either static addresses or elements of one allocated array.
pub fn random_adaptive_module(ch: &mut Choices) -> ProgramShape {
    let nq = if ch.flag() { 2 } else { 4 };
    let dynamic = ch.below(3) == 0;
    let mut g = Gen { ch, body: String::new(), tmp: 0, prev: "entry".into(), nq, array: None };
    if dynamic {
        writeln!(g.body, "  %arr = call ptr @__quantum__rt__qubit_allocate_array(i64 {nq})").unwrap();
        g.array = Some("arr".into());
    }
    for _ in 0..g.ch.range(1, 4) {
        match g.ch.below(4) {
            0 => g.straight(),
            1 => g.phi_loop(),
            2 => g.slot_loop(),
            _ => g.select_gate(),
        }
    }
    let order = g.ch.distinct(nq, nq);
    // Released qubits must be in a basis state, so dynamic ones are all measured.
    let measured = if dynamic { nq } else { g.ch.range(1, nq as u32) as usize };
    for (r, q) in order.iter().take(measured).enumerate() {
        let qp = g.qubit_from(&q.to_string());
        let rp = if r == 0 { "null".to_string() } else { format!("inttoptr (i64 {r} to ptr)") };
        writeln!(g.body, "  call void @__quantum__qis__mz__body(ptr {qp}, ptr writeonly {rp})").unwrap();
    }
    let record = g.ch.below(3);
    if record > 0 {
        let mut idx: Vec<usize> = (0..measured).collect();
        if record == 2 {
            idx.reverse();
        }
        for r in idx {
            let rp = if r == 0 { "null".to_string() } else { format!("inttoptr (i64 {r} to ptr)") };
            writeln!(g.body, "  call void @__quantum__rt__result_record_output(ptr {rp}, ptr @label)").unwrap();
        }
    }
    if dynamic {
        writeln!(g.body, "  call void @__quantum__rt__qubit_release_array(ptr %arr)").unwrap();
    }
    let mut text = String::from("@label = internal constant [2 x i8] c\"r\\00\"\n\ndefine void @main() #0 {\nentry:\n");
    text.push_str(&g.body);
    text.push_str("  ret void\n}\n\n");
    let mut decls: Vec<String> = Vec::new();
    for line in g.body.lines() {
        if let Some(at) = line.find("call ") {
            let rest = &line[at + 5..];
            let ret = rest.split_whitespace().next().unwrap();
            let name = rest.split('@').nth(1).unwrap().split('(').next().unwrap();
            let params: Vec<&str> = rest
                .split_once('(')
                .unwrap()
                .1
                .trim_end_matches(')')
                .split(", ")
                .map(|a| a.split_whitespace().next().unwrap())
                .collect();
            let d = format!("declare {ret} @{name}({})", params.join(", "));
            if !decls.contains(&d) {
                decls.push(d);
            }
        }
    }
    for d in decls {
        text.push_str(&d);
        text.push('\n');
    }
    text.push_str("\nattributes #0 = { \"entry_point\" }\n");
    ProgramShape { text, num_qubits: nq, dynamic }
}

// ---------------------------------------------------------------------------
// State comparison across qubit relabelings.

use qir_toolkit::runtime::{QubitKey, StateVector};

/// Largest amplitude difference between `a` and `b`, where program qubit
/// `k` of `a` corresponds to `map(k)` in `b`. Qubits of `b` with no
/// counterpart must be |0>.
pub fn relabeled_diff(
    a: &StateVector,
    a_order: &[QubitKey],
    b: &StateVector,
    b_order: &[QubitKey],
    map: impl Fn(QubitKey) -> QubitKey,
) -> f64 {
    let pos: Vec<usize> = a_order
        .iter()
        .map(|&k| b_order.iter().position(|&o| o == map(k)).expect("qubit has a counterpart"))
        .collect();
    let covered: usize = pos.iter().map(|p| 1usize << p).sum();
    let (aa, ba) = (a.amplitudes(), b.amplitudes());
    let mut worst = 0.0f64;
    for (bi, amp) in ba.iter().enumerate() {
        if bi & !covered != 0 {
            worst = worst.max(amp.norm());
            continue;
        }
        let ai: usize = pos.iter().enumerate().filter(|(_, p)| bi >> **p & 1 == 1).map(|(j, _)| 1 << j).sum();
        worst = worst.max((aa[ai] - amp).norm());
    }
    worst
}
