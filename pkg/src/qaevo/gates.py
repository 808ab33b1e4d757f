"""Gate catalog, chromosomes and circuit serialization.

Qubit 0 is the most significant bit of every basis-state index, so on three
qubits ``|100>`` is index 4.  Angles are radians in ``[-pi, pi]``.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class InvalidGateError(ValueError):
    """A gate does not fit the register it is applied to."""


class MalformedGateError(ValueError):
    """A gate's fields disagree with its kind (missing/extra angle or control)."""


class GateKind(enum.IntEnum):
    IDENTITY = 0
    H = 1
    X = 2
    Y = 3
    Z = 4
    RX = 5
    RY = 6
    RZ = 7
    CX = 8
    CY = 9
    CZ = 10
    CH = 11
    CRX = 12
    CRY = 13
    CRZ = 14
    ORACLE = 15


PARAMETERIZED = frozenset(
    {GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CRX, GateKind.CRY, GateKind.CRZ}
)
CONTROLLED = frozenset(
    {GateKind.CX, GateKind.CY, GateKind.CZ, GateKind.CH, GateKind.CRX, GateKind.CRY, GateKind.CRZ}
)
SUPERPOSITION = frozenset(
    {GateKind.H, GateKind.RX, GateKind.RY, GateKind.CH, GateKind.CRX, GateKind.CRY}
)

DEFAULT_GATE_SET = frozenset(
    {
        GateKind.IDENTITY, GateKind.H, GateKind.X, GateKind.Y, GateKind.Z,
        GateKind.RX, GateKind.RY, GateKind.RZ,
        GateKind.CX, GateKind.CY, GateKind.CZ, GateKind.CH,
        GateKind.ORACLE,
    }
)

# Base (uncontrolled) single-qubit action of each controlled kind.
_CONTROLLED_BASE = {
    GateKind.CX: GateKind.X,
    GateKind.CY: GateKind.Y,
    GateKind.CZ: GateKind.Z,
    GateKind.CH: GateKind.H,
    GateKind.CRX: GateKind.RX,
    GateKind.CRY: GateKind.RY,
    GateKind.CRZ: GateKind.RZ,
}

_SQ2 = 1.0 / math.sqrt(2.0)
_FIXED = {
    GateKind.IDENTITY: np.eye(2, dtype=np.complex128),
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def base_matrix(kind: GateKind, angle: float = 0.0) -> np.ndarray:
    """2x2 matrix applied to the target qubit (when the control is set)."""
    kind = _CONTROLLED_BASE.get(kind, kind)
    if kind in _FIXED:
        return _FIXED[kind].copy()
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind == GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == GateKind.RZ:
        return np.array(
            [[complex(c, -s), 0], [0, complex(c, s)]], dtype=np.complex128
        )
    raise MalformedGateError(f"{kind.name} has no 2x2 matrix")


@dataclass(frozen=True)
class GateSpec:
    kind: GateKind
    target: int = 0
    control: int | None = None
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        controlled = self.kind in CONTROLLED
        if controlled != (self.control is not None):
            raise MalformedGateError(
                f"{self.kind.name}: control must be given iff the kind is controlled"
            )
        if (self.kind in PARAMETERIZED) != (self.angle is not None):
            raise MalformedGateError(
                f"{self.kind.name}: angle must be given iff the kind is parameterized"
            )
        if self.angle is not None and not -math.pi <= self.angle <= math.pi:
            raise MalformedGateError(f"angle {self.angle} outside [-pi, pi]")
        if controlled and self.control == self.target:
            raise InvalidGateError("control and target coincide")

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.control is None:
            return (self.target,)
        return (self.control, self.target)

    def check(self, num_qubits: int) -> None:
        """Raise InvalidGateError unless every index fits ``num_qubits``."""
        if self.kind == GateKind.ORACLE:
            return
        for q in self.qubits:
            if not 0 <= q < num_qubits:
                raise InvalidGateError(
                    f"{self.kind.name} index {q} outside register of {num_qubits}"
                )

    def matrix(self) -> np.ndarray:
        return base_matrix(self.kind, self.angle or 0.0)

    def __str__(self):
        name = self.kind.name
        if self.kind == GateKind.ORACLE:
            return "ORACLE"
        if self.angle is not None:
            name += f"({self.angle!r})"
        if self.control is not None:
            return f"{name} q{self.control} -> q{self.target}"
        return f"{name} q{self.target}"


IDENTITY = GateSpec(GateKind.IDENTITY)
ORACLE = GateSpec(GateKind.ORACLE)


class Chromosome(tuple):
    """Fixed-length gate sequence; Identity genes act as padding."""

    def __new__(cls, genes: Iterable[GateSpec] = ()):
        return super().__new__(cls, genes)

    @classmethod
    def padded(cls, genes: Sequence[GateSpec], length: int) -> "Chromosome":
        if len(genes) > length:
            raise ValueError(f"{len(genes)} genes do not fit length {length}")
        return cls(list(genes) + [IDENTITY] * (length - len(genes)))

    def check(self, num_qubits: int) -> None:
        for pos, gene in enumerate(self):
            try:
                gene.check(num_qubits)
            except InvalidGateError as exc:
                raise InvalidGateError(f"gene {pos}: {exc}") from None

    def to_arrays(self):
        """(kinds, targets, controls, angles) arrays; control -1 when absent."""
        n = len(self)
        kinds = np.empty(n, dtype=np.int64)
        targets = np.empty(n, dtype=np.int64)
        controls = np.full(n, -1, dtype=np.int64)
        angles = np.zeros(n, dtype=np.float64)
        for i, g in enumerate(self):
            kinds[i] = int(g.kind)
            targets[i] = g.target
            if g.control is not None:
                controls[i] = g.control
            if g.angle is not None:
                angles[i] = g.angle
        return kinds, targets, controls, angles

    @classmethod
    def from_arrays(cls, kinds, targets, controls, angles) -> "Chromosome":
        genes = []
        for k, t, c, a in zip(kinds, targets, controls, angles):
            k = GateKind(int(k))
            genes.append(
                GateSpec(
                    k,
                    int(t),
                    int(c) if k in CONTROLLED else None,
                    float(a) if k in PARAMETERIZED else None,
                )
            )
        return cls(genes)

    def __repr__(self):
        return f"Chromosome({list(self)!r})"


def count_gates(chromosome: Sequence[GateSpec]) -> int:
    return sum(1 for g in chromosome if g.kind != GateKind.IDENTITY)


def count_oracle_gates(chromosome: Sequence[GateSpec]) -> int:
    return sum(1 for g in chromosome if g.kind == GateKind.ORACLE)


# ---------------------------------------------------------------- sampling

def _sorted_kinds(gate_set) -> np.ndarray:
    kinds = np.array(sorted(int(GateKind(k)) for k in gate_set), dtype=np.int64)
    if kinds.size == 0:
        raise ValueError("gate set is empty")
    return kinds


def random_gene_arrays(shape, num_qubits: int, gate_set, rng: np.random.Generator):
    """Draw independent random genes in array form.

    Returns ``(kinds, targets, controls, angles)``, each of ``shape``.
    Kinds are uniform over ``gate_set``, (control, target) uniform over
    ordered pairs of distinct qubits, angles uniform on ``[-pi, pi]``.
    """
    pool = _sorted_kinds(gate_set)
    if num_qubits < 2 and any(GateKind(k) in CONTROLLED for k in pool):
        raise ValueError("controlled gates need at least two qubits")
    kinds = pool[rng.integers(0, pool.size, size=shape)]
    targets = rng.integers(0, num_qubits, size=shape)
    # offset in [1, n-1] keeps control distinct from target
    offsets = rng.integers(1, max(num_qubits, 2), size=shape)
    angles = rng.uniform(-math.pi, math.pi, size=shape)
    controlled = np.isin(kinds, [int(k) for k in CONTROLLED])
    controls = np.where(controlled, (targets + offsets) % num_qubits, -1)
    parameterized = np.isin(kinds, [int(k) for k in PARAMETERIZED])
    angles = np.where(parameterized, angles, 0.0)
    # the oracle spans all qubits; its target field is unused
    targets = np.where(kinds == int(GateKind.ORACLE), 0, targets)
    return kinds, targets.astype(np.int64), controls.astype(np.int64), angles


def random_gate(num_qubits: int, gate_set, rng: np.random.Generator) -> GateSpec:
    k, t, c, a = random_gene_arrays((1,), num_qubits, gate_set, rng)
    return Chromosome.from_arrays(k, t, c, a)[0]


# ---------------------------------------------------------------- QASM

_QASM_NAMES = {
    GateKind.H: "h", GateKind.X: "x", GateKind.Y: "y", GateKind.Z: "z",
    GateKind.RX: "rx", GateKind.RY: "ry", GateKind.RZ: "rz",
    GateKind.CX: "cx", GateKind.CY: "cy", GateKind.CZ: "cz", GateKind.CH: "ch",
    GateKind.CRX: "crx", GateKind.CRY: "cry", GateKind.CRZ: "crz",
    GateKind.IDENTITY: "id",
}
_QASM_KINDS = {v: k for k, v in _QASM_NAMES.items()}
_QASM_KINDS["cnot"] = GateKind.CX

_QASM_LINE = re.compile(
    r"^(?P<name>[a-z]+)\s*(?:\((?P<angle>[^)]*)\))?\s+(?P<args>q\[\d+\](?:\s*,\s*q\[\d+\])*)\s*;$"
)


def to_qasm(chromosome: Sequence[GateSpec], num_qubits: int) -> str:
    """OpenQASM 2.0 text.  Identity padding is dropped; oracle calls become an
    opaque ``oracle`` gate spanning the whole register."""
    Chromosome(chromosome).check(num_qubits)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    if count_oracle_gates(chromosome):
        params = ",".join(f"a{i}" for i in range(num_qubits))
        lines.append(f"opaque oracle {params};")
    lines.append(f"qreg q[{num_qubits}];")
    for g in chromosome:
        if g.kind == GateKind.IDENTITY:
            continue
        if g.kind == GateKind.ORACLE:
            args = ",".join(f"q[{i}]" for i in range(num_qubits))
            lines.append(f"oracle {args};")
            continue
        name = _QASM_NAMES[g.kind]
        if g.angle is not None:
            name += f"({g.angle!r})"
        args = ",".join(f"q[{q}]" for q in g.qubits)
        lines.append(f"{name} {args};")
    return "\n".join(lines) + "\n"


def _parse_angle(text: str) -> float:
    expr = text.strip().replace("pi", repr(math.pi))
    if not re.fullmatch(r"[0-9eE+\-*/. ()]+", expr):
        raise ValueError(f"unsupported angle expression {text!r}")
    return float(eval(expr, {"__builtins__": {}}))  # arithmetic only, checked above


def from_qasm(text: str, length: int | None = None) -> tuple[Chromosome, int]:
    """Parse text written by :func:`to_qasm` (or the same gate subset).

    Returns ``(chromosome, num_qubits)``; the chromosome is padded with
    Identity genes to ``length`` when given.
    """
    num_qubits = None
    genes: list[GateSpec] = []
    for raw in text.splitlines():
        line = raw.split("//", 1)[0].strip()
        if not line or line.startswith(("OPENQASM", "include", "opaque", "creg", "barrier", "measure")):
            continue
        m = re.fullmatch(r"qreg\s+q\[(\d+)\];", line)
        if m:
            num_qubits = int(m.group(1))
            continue
        m = _QASM_LINE.match(line)
        if m is None:
            raise ValueError(f"cannot parse QASM line {raw!r}")
        name = m.group("name")
        qubits = [int(q) for q in re.findall(r"q\[(\d+)\]", m.group("args"))]
        if name == "oracle":
            genes.append(ORACLE)
            continue
        if name not in _QASM_KINDS:
            raise ValueError(f"unsupported gate {name!r}")
        kind = _QASM_KINDS[name]
        angle = _parse_angle(m.group("angle")) if m.group("angle") else None
        if kind in CONTROLLED:
            genes.append(GateSpec(kind, qubits[1], qubits[0], angle))
        else:
            genes.append(GateSpec(kind, qubits[0], None, angle))
    if num_qubits is None:
        raise ValueError("no qreg declaration")
    chromosome = Chromosome(genes) if length is None else Chromosome.padded(genes, length)
    chromosome.check(num_qubits)
    return chromosome, num_qubits


# ---------------------------------------------------------------- text diagram

def to_text(chromosome: Sequence[GateSpec]) -> str:
    """One line per gene: ``<position>: <gate>``, padding included."""
    width = len(str(max(len(chromosome) - 1, 0)))
    return "\n".join(f"{i:0{width}d}: {g}" for i, g in enumerate(chromosome)) + "\n"


_TEXT_LINE = re.compile(
    r"^\d+:\s+(?P<name>[A-Z]+)(?:\((?P<angle>[^)]*)\))?"
    r"(?:\s+q(?P<a>\d+)(?:\s+->\s+q(?P<b>\d+))?)?$"
)


def from_text(text: str) -> Chromosome:
    genes = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        m = _TEXT_LINE.match(raw.strip())
        if m is None:
            raise ValueError(f"cannot parse diagram line {raw!r}")
        kind = GateKind[m.group("name")]
        angle = float(m.group("angle")) if m.group("angle") else None
        if kind == GateKind.ORACLE:
            genes.append(ORACLE)
        elif m.group("b") is not None:
            genes.append(GateSpec(kind, int(m.group("b")), int(m.group("a")), angle))
        else:
            genes.append(GateSpec(kind, int(m.group("a") or 0), None, angle))
    return Chromosome(genes)
