"""Dense state vectors and operators over small chains of labelled qubits.

Registers are ordered tuples of system labels. The protocol uses the
canonical order ``("r", "a", "l", "g")``; :func:`embed` permutes operators
into any larger register. Everything is double-precision complex and
compared with a shared tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

EPS = 1e-9
CANONICAL_ORDER = ("r", "a", "l", "g")


class QuantumError(ValueError):
    pass


class LabelClashError(QuantumError):
    pass


class RegisterMismatchError(QuantumError):
    pass


class UndefinedUpdateError(QuantumError):
    """Raised when a Lüders update conditions on a zero-probability outcome."""


class NonUnitaryError(QuantumError):
    pass


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


def _check_register(register: Sequence[str]) -> tuple[str, ...]:
    register = tuple(register)
    if len(set(register)) != len(register):
        raise LabelClashError(f"duplicate system labels in register {register}")
    return register


@dataclass(frozen=True, eq=False)
class StateVector:
    register: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        register = _check_register(self.register)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape[0] != 2 ** len(register):
            raise QuantumError(
                f"{amps.shape[0]} amplitudes do not fit register {register}"
            )
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, eps: float = EPS) -> bool:
        return abs(self.norm_squared - 1.0) < eps

    def normalized(self) -> "StateVector":
        return StateVector(self.register, self.amplitudes / np.sqrt(self.norm_squared))

    def equals_up_to_phase(self, other: "StateVector", eps: float = EPS) -> bool:
        """Ray equality: ``other == e^{i phi} self`` for some real phi."""
        if self.register != other.register:
            return False
        overlap = np.vdot(self.amplitudes, other.amplitudes)
        return abs(abs(overlap) - np.sqrt(self.norm_squared * other.norm_squared)) < eps

    def __repr__(self) -> str:
        return f"StateVector({''.join(self.register)}: {format_vector(self.amplitudes)})"


@dataclass(frozen=True, eq=False)
class DenseOperator:
    register: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        register = _check_register(self.register)
        mat = _frozen(self.matrix)
        dim = 2 ** len(register)
        if mat.shape != (dim, dim):
            raise QuantumError(f"matrix of shape {mat.shape} does not fit register {register}")
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, DenseOperator):
            _same_register(self, other)
            return DenseOperator(self.register, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            _same_register(self, other)
            return StateVector(self.register, self.matrix @ other.amplitudes)
        return NotImplemented

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        _same_register(self, other)
        return DenseOperator(self.register, self.matrix + other.matrix)

    def __sub__(self, other: "DenseOperator") -> "DenseOperator":
        _same_register(self, other)
        return DenseOperator(self.register, self.matrix - other.matrix)

    def __rmul__(self, scalar: complex) -> "DenseOperator":
        return DenseOperator(self.register, scalar * self.matrix)

    def allclose(self, other: "DenseOperator", eps: float = EPS) -> bool:
        return self.register == other.register and bool(
            np.allclose(self.matrix, other.matrix, atol=eps, rtol=0.0)
        )

    def rows(self) -> list[list[tuple[float, float]]]:
        """Row-major (real, imag) pairs, for debugging dumps."""
        return [[(float(z.real), float(z.imag)) for z in row] for row in self.matrix]

    def __repr__(self) -> str:
        return f"DenseOperator({''.join(self.register)}, dim={self.dim})"


def _same_register(x, y) -> None:
    if x.register != y.register:
        raise RegisterMismatchError(f"register {x.register} != {y.register}")


def format_vector(amps: Iterable[complex], digits: int = 6) -> str:
    parts = []
    for z in amps:
        re, im = round(float(z.real), digits) + 0.0, round(float(z.imag), digits) + 0.0
        parts.append(f"{re}" if im == 0 else f"({re}{im:+}j)")
    return "[" + ", ".join(parts) + "]"


# single-qubit building blocks ------------------------------------------------

KET0 = _frozen([1, 0])
KET1 = _frozen([0, 1])
KET_PLUS = _frozen([np.sqrt(0.5), np.sqrt(0.5)])
PI0 = _frozen([[1, 0], [0, 0]])
PI1 = _frozen([[0, 0], [0, 1]])
SIGMA_X = _frozen([[0, 1], [1, 0]])
SIGMA_Z = _frozen([[1, 0], [0, -1]])
ID2 = _frozen(np.eye(2))
# |0><1| and |1><0|
KET0_BRA1 = _frozen([[0, 1], [0, 0]])
KET1_BRA0 = _frozen([[0, 0], [1, 0]])


def ket(register: Sequence[str], amplitudes) -> StateVector:
    return StateVector(tuple(register), amplitudes)


def basis_state(register: Sequence[str], bits: Sequence[int] | str) -> StateVector:
    register = tuple(register)
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    if len(bits) != len(register):
        raise QuantumError("one bit per system required")
    index = int("".join(str(b) for b in bits), 2) if bits else 0
    amps = np.zeros(2 ** len(register), dtype=complex)
    amps[index] = 1.0
    return StateVector(register, amps)


def operator(register: Sequence[str], matrix) -> DenseOperator:
    return DenseOperator(tuple(register), matrix)


def identity(register: Sequence[str]) -> DenseOperator:
    register = tuple(register)
    return DenseOperator(register, np.eye(2 ** len(register)))


def projector_onto(state: StateVector) -> DenseOperator:
    v = state.amplitudes
    return DenseOperator(state.register, np.outer(v, v.conj()))


def ok_state(pair: Sequence[str]) -> StateVector:
    """sqrt(1/2)(|00> - |11>) on a two-system register."""
    return StateVector(tuple(pair), np.array([1, 0, 0, -1]) * np.sqrt(0.5))


def fail_state(pair: Sequence[str]) -> StateVector:
    """sqrt(1/2)(|00> + |11>) on a two-system register."""
    return StateVector(tuple(pair), np.array([1, 0, 0, 1]) * np.sqrt(0.5))


def init_state() -> StateVector:
    """|init>_r (x) |0>_a |0>_l |0>_g, with |init> = sqrt(1/3)|0> + sqrt(2/3)|1>."""
    r = StateVector(("r",), [np.sqrt(1 / 3), np.sqrt(2 / 3)])
    return reduce(tensor, [r] + [StateVector((s,), KET0) for s in ("a", "l", "g")])


# core operations -----------------------------------------------------------------


def tensor(a, b):
    """Kronecker product of two states or two operators on disjoint registers."""
    clash = set(a.register) & set(b.register)
    if clash:
        raise LabelClashError(f"systems {sorted(clash)} appear on both sides")
    register = a.register + b.register
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(register, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DenseOperator) and isinstance(b, DenseOperator):
        return DenseOperator(register, np.kron(a.matrix, b.matrix))
    raise TypeError("tensor needs two states or two operators")


def embed(op: DenseOperator, target: Sequence[str]) -> DenseOperator:
    """Extend ``op`` by identities to ``target`` and reorder to its slot order."""
    target = _check_register(target)
    missing = [s for s in op.register if s not in target]
    if missing:
        raise RegisterMismatchError(f"systems {missing} not in target register {target}")
    rest = tuple(s for s in target if s not in op.register)
    full = op.register + rest
    mat = np.kron(op.matrix, np.eye(2 ** len(rest)))
    n = len(target)
    # axes of `mat` as a 2n-index tensor follow `full`; permute to `target`
    perm = [full.index(s) for s in target]
    tens = mat.reshape([2] * (2 * n)).transpose(perm + [n + p for p in perm])
    return DenseOperator(target, tens.reshape(2**n, 2**n))


def reorder(state: StateVector, target: Sequence[str]) -> StateVector:
    target = _check_register(target)
    if sorted(target) != sorted(state.register):
        raise RegisterMismatchError(f"cannot reorder {state.register} to {target}")
    perm = [state.register.index(s) for s in target]
    amps = state.amplitudes.reshape([2] * len(target)).transpose(perm).reshape(-1)
    return StateVector(target, amps)


def adjoint(op: DenseOperator) -> DenseOperator:
    return DenseOperator(op.register, op.matrix.conj().T)


def is_hermitian(op: DenseOperator, eps: float = EPS) -> bool:
    return bool(np.allclose(op.matrix, op.matrix.conj().T, atol=eps, rtol=0.0))


def is_unitary(op: DenseOperator, eps: float = EPS) -> bool:
    m = op.matrix
    eye = np.eye(op.dim)
    return bool(
        np.allclose(m.conj().T @ m, eye, atol=eps, rtol=0.0)
        and np.allclose(m @ m.conj().T, eye, atol=eps, rtol=0.0)
    )


def is_projector(op: DenseOperator, eps: float = EPS) -> bool:
    m = op.matrix
    return is_hermitian(op, eps) and bool(np.allclose(m @ m, m, atol=eps, rtol=0.0))


def expectation(state: StateVector, op: DenseOperator, eps: float = EPS) -> float:
    """<v|op|v> for any operator whose expectation on ``state`` is real.

    Used for the sequential projector products, which need not be Hermitian.
    """
    _same_register(state, op)
    value = np.vdot(state.amplitudes, op.matrix @ state.amplitudes)
    if abs(value.imag) >= eps:
        raise QuantumError(f"expectation has imaginary part {value.imag:.3g}")
    return float(value.real)


def born(state: StateVector, op: DenseOperator, eps: float = EPS) -> float:
    """Born-rule expectation <v|op|v> of a Hermitian operator."""
    _same_register(state, op)
    if not is_hermitian(op, eps):
        raise QuantumError("born() needs a Hermitian operator")
    value = expectation(state, op, eps)
    if is_projector(op, eps):
        if value < -eps or value > 1 + eps:
            raise QuantumError(f"projector expectation {value} outside [0, 1]")
        value = min(max(value, 0.0), 1.0)
    return value


def density(state: StateVector) -> DenseOperator:
    return projector_onto(state)


def mixture(components: Iterable[tuple[float, StateVector]], eps: float = EPS) -> DenseOperator:
    """Convex sum of pure states; weights must be non-negative and sum to 1."""
    components = list(components)
    total = sum(w for w, _ in components)
    if any(w < 0 for w, _ in components) or abs(total - 1.0) >= eps:
        raise QuantumError("mixture weights must form a probability distribution")
    register = components[0][1].register
    mat = np.zeros((2 ** len(register),) * 2, dtype=complex)
    for w, s in components:
        _same_register(components[0][1], s)
        mat = mat + w * density(s).matrix
    return DenseOperator(register, mat)


def trace_prob(rho: DenseOperator, proj: DenseOperator) -> float:
    _same_register(rho, proj)
    return float(np.trace(rho.matrix @ proj.matrix).real)


def lueders(state, proj: DenseOperator, eps: float = EPS):
    """Selective projective update: project and renormalise.

    Accepts a pure state vector or a density operator and returns the same kind.
    """
    _same_register(state, proj)
    if isinstance(state, StateVector):
        p = born(state, proj, eps)
        if p <= eps:
            raise UndefinedUpdateError("outcome has probability zero")
        return StateVector(state.register, proj.matrix @ state.amplitudes / np.sqrt(p))
    p = trace_prob(state, proj)
    if p <= eps:
        raise UndefinedUpdateError("outcome has probability zero")
    return DenseOperator(state.register, proj.matrix @ state.matrix @ proj.matrix / p)


def heisenberg(proj: DenseOperator, u: DenseOperator, eps: float = EPS) -> DenseOperator:
    """Evolve an operator to the Heisenberg picture: U^dagger proj U."""
    _same_register(proj, u)
    if not is_unitary(u, eps):
        raise NonUnitaryError("evolution operator is not unitary")
    return DenseOperator(proj.register, u.matrix.conj().T @ proj.matrix @ u.matrix)


def product(ops: Sequence[DenseOperator]) -> DenseOperator:
    """Left-to-right operator product ``ops[0] @ ops[1] @ ...``."""
    return reduce(lambda x, y: x @ y, ops)


@dataclass(frozen=True)
class Observable:
    outcomes: tuple[tuple[str, DenseOperator], ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if not self.outcomes:
            raise QuantumError("observable without outcomes")

    @property
    def register(self) -> tuple[str, ...]:
        return self.outcomes[0][1].register

    def projector(self, label: str) -> DenseOperator:
        for name, proj in self.outcomes:
            if name == label:
                return proj
        raise KeyError(label)

    def is_valid(self, eps: float = EPS) -> bool:
        projs = [p for _, p in self.outcomes]
        if not all(is_projector(p, eps) for p in projs):
            return False
        total = reduce(lambda x, y: x + y, projs)
        if not total.allclose(identity(self.register), eps):
            return False
        return all(
            np.allclose(p.matrix @ q.matrix, 0, atol=eps)
            for i, p in enumerate(projs)
            for j, q in enumerate(projs)
            if i != j
        )

    def distribution(self, state: StateVector, eps: float = EPS) -> dict[str, float]:
        return {name: born(state, p, eps) for name, p in self.outcomes}


def computational_observable(system: str) -> Observable:
    return Observable(
        (("0", operator((system,), PI0)), ("1", operator((system,), PI1)))
    )


def ok_fail_observable(pair: Sequence[str]) -> Observable:
    """ok / fail on a pair; ``other`` covers the remaining two Bell directions so
    the outcomes resolve the identity."""
    ok, fail = projector_onto(ok_state(pair)), projector_onto(fail_state(pair))
    return Observable((("ok", ok), ("fail", fail), ("other", identity(pair) - ok - fail)))


# protocol unitaries and expectation values-----------------------------------------


def _kron(*mats) -> np.ndarray:
    return reduce(np.kron, mats)


def fr_unitaries() -> dict[str, DenseOperator]:
    """The three global couplings on (r, a, l, g) and Amanda's local U_a on (l, g)."""
    i2 = _kron(ID2, ID2)
    i3 = _kron(ID2, ID2, ID2)
    hadamard = (SIGMA_X + SIGMA_Z) * np.sqrt(0.5)
    u_a = _kron(PI0, ID2) + _kron(PI1, SIGMA_X)
    reg = CANONICAL_ORDER
    return {
        "U_t1": operator(reg, _kron(PI0, i3) + _kron(PI1, SIGMA_X, i2)),
        "U_tprime": operator(reg, _kron(PI0, i3) + _kron(PI1, ID2, hadamard, ID2)),
        "U_t2": operator(reg, _kron(PI0, i3) + _kron(PI1, ID2, u_a)),
        "U_a": operator(("l", "g"), u_a),
    }


@dataclass(frozen=True)
class HeisenbergProjectors:
    """The evolved protocol projectors on (r, a, l, g)."""

    one_a_t1: DenseOperator
    zero_a_t1: DenseOperator
    zero_g_t2: DenseOperator
    one_g_t2: DenseOperator
    ok_c_t3: DenseOperator
    ok_d_t4: DenseOperator


def heisenberg_projectors() -> HeisenbergProjectors:
    us = fr_unitaries()
    to_t2 = us["U_tprime"] @ us["U_t1"]
    to_t3 = us["U_t2"] @ to_t2
    reg = CANONICAL_ORDER
    pi_ok = projector_onto(ok_state(("x", "y"))).matrix

    def local(system: str, mat) -> DenseOperator:
        return embed(operator((system,), mat), reg)

    return HeisenbergProjectors(
        # the memory evolves trivially before t1
        one_a_t1=local("r", PI1),
        zero_a_t1=local("r", PI0),
        zero_g_t2=heisenberg(local("l", PI0), to_t2),
        one_g_t2=heisenberg(local("l", PI1), to_t2),
        ok_c_t3=heisenberg(embed(operator(("r", "a"), pi_ok), reg), to_t3),
        ok_d_t4=heisenberg(embed(operator(("l", "g"), pi_ok), reg), to_t3),
    )


def no_ok_and_zero_g() -> DenseOperator:
    """I - Pi_ok^{t3} Pi_0^{t2}: 'not (ok_c and 0_g)'."""
    h = heisenberg_projectors()
    return identity(CANONICAL_ORDER) - h.ok_c_t3 @ h.zero_g_t2


def not_joint_event() -> DenseOperator:
    """I - Pi_ok^{t4} Pi_ok^{t3} Pi_1^{t2} Pi_1^{t1}: 'not (1_a, 1_g, ok_c, ok_d)'."""
    h = heisenberg_projectors()
    joint = product([h.ok_d_t4, h.ok_c_t3, h.one_g_t2, h.one_a_t1])
    return identity(CANONICAL_ORDER) - joint


def amanda_projectors() -> dict[str, DenseOperator]:
    """U_a-evolved 'fail' and 'not ok' projectors on (l, g)."""
    u_a = fr_unitaries()["U_a"]
    lg = ("l", "g")
    return {
        "fail": heisenberg(projector_onto(fail_state(lg)), u_a),
        "not_ok": heisenberg(identity(lg) - projector_onto(ok_state(lg)), u_a),
    }


def plus_zero() -> StateVector:
    return tensor(StateVector(("l",), KET_PLUS), StateVector(("g",), KET0))


def appendix_values(eps: float = EPS) -> dict[str, float]:
    """The protocol expectation values, as explicit operator products."""
    h = heisenberg_projectors()
    init = init_state()
    joint = expectation(init, product([h.ok_d_t4, h.ok_c_t3, h.one_g_t2, h.one_a_t1]), eps)
    amanda = amanda_projectors()
    start = plus_zero()
    return {
        "a1": expectation(init, h.ok_c_t3 @ h.zero_g_t2, eps),
        "a2_joint": joint,
        "a2_complement": expectation(init, not_joint_event(), eps),
        "a3": expectation(init, h.one_g_t2 @ h.zero_a_t1, eps),
        "a4_fail": born(start, amanda["fail"], eps),
        "a4_not_ok": born(start, amanda["not_ok"], eps),
    }


APPENDIX_TARGETS = {
    "a1": 0.0,
    "a2_joint": 1 / 12,
    "a2_complement": 11 / 12,
    "a3": 0.0,
    "a4_fail": 1.0,
    "a4_not_ok": 1.0,
}


def psi_state() -> StateVector:
    """Global state after t2: U_t2 U_t' U_t1 |init>."""
    us = fr_unitaries()
    return us["U_t2"] @ (us["U_tprime"] @ (us["U_t1"] @ init_state()))
