"""Transmission schemes for the Monte Carlo simulator.

A scheme is a superposition of subcodebooks. Each subcodebook carries a
payload built from message labels by multiplexing (bijective
concatenation) or index coding (bitwise XOR with zero padding), and each
receiver runs an ordered list of decoding steps. Subcodebook 1 is the
innermost layer; weaker receivers peel the higher-numbered layers first.

Message labels name a whole message (``m2``) or one part of a split
message (``m12`` is the second part of M1); the first digit is the owner.

Bit messages are LSB first: bit ``k`` weighs ``2**k``, so padding at the end
of a bit list matches the high-order zeros of an integer index.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from graphs import GroupMember, SideInfoGraph, decompose

POWER_TOL = 1e-9


class SchemeError(ValueError):
    """Inconsistent scheme description."""


class UnsupportedSchemeError(SchemeError):
    """No simulated scheme exists for the configuration (dirty-paper groups)."""


def xor_pad(a: Sequence[int], b: Sequence[int]) -> "tuple[int, ...]":
    """Bitwise XOR of two bit messages, the shorter one zero-extended."""
    width = max(len(a), len(b))
    a = tuple(a) + (0,) * (width - len(a))
    b = tuple(b) + (0,) * (width - len(b))
    return tuple(x ^ y for x, y in zip(a, b))


def int_to_bits(value: int, width: int) -> "tuple[int, ...]":
    return tuple((value >> k) & 1 for k in range(width))


def bits_to_int(bits: Sequence[int]) -> int:
    return sum(bit << k for k, bit in enumerate(bits))


@dataclass(frozen=True)
class Payload:
    """Composition tree over message labels: ``msg``, ``mux`` or ``xor`` nodes."""
    op: str
    label: str = ""
    children: "tuple[Payload, ...]" = ()

    def labels(self) -> "tuple[str, ...]":
        if self.op == "msg":
            return (self.label,)
        out = []
        for child in self.children:
            out.extend(l for l in child.labels() if l not in out)
        return tuple(out)

    def num_bits(self, bits: "dict[str, int]") -> int:
        if self.op == "msg":
            return bits.get(self.label, 0)
        sizes = [c.num_bits(bits) for c in self.children]
        return sum(sizes) if self.op == "mux" else max(sizes)

    def index(self, values: dict, bits: "dict[str, int]"):
        """Codeword index of the payload; ``values`` may hold arrays of candidates.

        Keys are message labels, or XOR nodes whose combined value is known
        without its operands.
        """
        if self.op == "msg":
            return values[self.label]
        if self.op == "xor":
            if self in values:
                return values[self]
            out = self.children[0].index(values, bits)
            for child in self.children[1:]:
                out = out ^ child.index(values, bits)
            return out
        out, shift = 0, 0
        for child in self.children:
            out = out | (child.index(values, bits) << shift)
            shift += child.num_bits(bits)
        return out

    def describe(self) -> str:
        if self.op == "msg":
            return self.label
        joiner = ", " if self.op == "mux" else " ⊕ "
        inner = joiner.join(c.describe() for c in self.children)
        return f"[{inner}]" if self.op == "mux" else inner


def msg(label: str) -> Payload:
    return Payload("msg", label)


def mux(*children) -> Payload:
    children = tuple(msg(c) if isinstance(c, str) else c for c in children)
    return children[0] if len(children) == 1 else Payload("mux", children=children)


def xor(*children) -> Payload:
    return Payload("xor", children=tuple(msg(c) if isinstance(c, str) else c for c in children))


def owner(label: str) -> int:
    """Receiver that requests the message a label belongs to."""
    return int(label[1])


@dataclass(frozen=True)
class Subcodebook:
    power: float
    payload: Payload


@dataclass(frozen=True)
class DecodeStep:
    """Subcodebooks decoded together; undecoded layers are treated as noise."""
    subcodebooks: "tuple[int, ...]"


@dataclass(frozen=True)
class SchemeSpec:
    """Subcodebooks (1-based) plus each receiver's decoding steps."""
    subcodebooks: "tuple[Subcodebook, ...]"
    decoders: "dict[int, tuple[DecodeStep, ...]]"
    graph: SideInfoGraph
    label: str = ""
    messages: "tuple[str, ...]" = field(default=())

    def __post_init__(self):
        labels = []
        for sc in self.subcodebooks:
            labels.extend(l for l in sc.payload.labels() if l not in labels)
        object.__setattr__(self, "messages", tuple(sorted(labels)))
        total = sum(sc.power for sc in self.subcodebooks)
        if any(sc.power < 0 for sc in self.subcodebooks) or abs(total - 1.0) > POWER_TOL:
            raise SchemeError(f"subcodebook powers must be nonnegative and sum to 1, got {total}")
        for i in self.graph.receivers():
            own = {l for l in self.messages if owner(l) == i}
            if not own:
                raise SchemeError(f"no subcodebook carries a message of receiver {i}")
            steps = self.decoders.get(i, ())
            reached = set()
            for step in steps:
                for k in step.subcodebooks:
                    if not 1 <= k <= len(self.subcodebooks):
                        raise SchemeError(f"receiver {i} decodes undefined subcodebook {k}")
                    reached.update(self.subcodebooks[k - 1].payload.labels())
            if not own <= reached:
                raise SchemeError(f"receiver {i} never decodes {sorted(own - reached)}")

    @property
    def num_receivers(self) -> int:
        return self.graph.num_receivers

    def side_info(self, i: int) -> "frozenset[str]":
        """Labels receiver ``i`` knows a priori."""
        known = self.graph.out_neighbors(i)
        return frozenset(l for l in self.messages if owner(l) in known)

    def own(self, i: int) -> "tuple[str, ...]":
        return tuple(l for l in self.messages if owner(l) == i)

    def with_powers(self, powers: Sequence[float]) -> "SchemeSpec":
        if len(powers) != len(self.subcodebooks):
            raise SchemeError(f"scheme has {len(self.subcodebooks)} subcodebooks, got {len(powers)} powers")
        subcodebooks = tuple(Subcodebook(float(a), sc.payload) for a, sc in zip(powers, self.subcodebooks))
        return SchemeSpec(subcodebooks, self.decoders, self.graph, self.label)

    def describe(self) -> str:
        return " + ".join(f"x{k}({sc.payload.describe()})" for k, sc in enumerate(self.subcodebooks, start=1))


def _steps(*groups) -> "tuple[DecodeStep, ...]":
    return tuple(DecodeStep(tuple(g)) for g in groups)


def _spec(g: SideInfoGraph, gm: GroupMember, payloads, decoders) -> SchemeSpec:
    share = 1.0 / len(payloads)
    return SchemeSpec(
        tuple(Subcodebook(share, p) for p in payloads),
        {i: _steps(*steps) for i, steps in decoders.items()},
        g,
        gm.label(),
    )


def scheme_for(gm: GroupMember, g: SideInfoGraph, powers: Optional[Sequence[float]] = None) -> SchemeSpec:
    """Multiplexing/index-coding scheme of a three-receiver member.

    Powers default to an equal split; group 4 needs dirty-paper coding and
    raises :class:`UnsupportedSchemeError`.
    """
    if decompose(g) != gm:
        raise SchemeError(f"graph decomposes to {decompose(g).label()}, not {gm.label()}")
    grp, mem = gm.group, gm.member
    if grp == 4:
        raise UnsupportedSchemeError(f"{gm.label()} uses dirty paper coding, which is not simulated")
    if grp == 1:
        spec = _spec(g, gm, [mux("m1"), mux("m2"), mux("m3")],
                     {1: [[3], [2], [1]], 2: [[3], [2]], 3: [[3]]})
    elif grp == 2:
        outer = xor("m2", "m3") if mem == 2 else mux("m2", "m3")
        spec = _spec(g, gm, [mux("m1"), outer], {1: [[2], [1]], 2: [[2]], 3: [[2]]})
    elif grp == 3:
        spec = _spec(g, gm, [mux("m1", "m2"), mux("m3")], {1: [[2], [1]], 2: [[2], [1]], 3: [[2]]})
    elif grp == 5:
        if mem == 2:
            payloads = [mux("m1", xor("m2", "m3")), xor("m2", "m3")]
        else:
            payloads = [mux("m1", "m2"), mux("m2", "m3")]
        spec = _spec(g, gm, payloads, {1: [[1, 2]], 2: [[1, 2]], 3: [[2]]})
    elif grp == 6:
        spec = _spec(g, gm, [mux("m1", "m2"), mux("m1", "m3")], {1: [[1, 2]], 2: [[2], [1]], 3: [[2]]})
    elif grp == 8:
        single = mux("m1", xor("m2", "m3")) if mem == 2 else mux("m1", "m2", "m3")
        spec = _spec(g, gm, [single], {1: [[1]], 2: [[1]], 3: [[1]]})
    elif mem in (1, 3, 4, 6):
        # M1 and M3 split: the second parts ride on x2 with M2.
        second = mux("m2", xor("m12", "m32")) if mem in (4, 6) else mux("m2", "m12", "m32")
        spec = _spec(g, gm, [mux("m11", "m31"), second], {1: [[2], [1]], 2: [[2]], 3: [[2], [1]]})
    else:
        if mem == 2:
            payloads = [mux("m1", xor("m2", "m3")), xor("m2", "m3")]
        else:
            payloads = [mux("m1", "m3"), mux("m2", "m3")]
        spec = _spec(g, gm, payloads, {1: [[1, 2]], 2: [[2]], 3: [[1, 2]]})
    return spec.with_powers(powers) if powers is not None else spec
