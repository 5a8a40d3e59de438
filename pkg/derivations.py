"""Rate-splitting derivations checked by exact elimination.

Each derivation pairs the decoding conditions of a scheme, written over
split rates, with the region they should project to. Capacity terms are
opaque nonnegative constants; chain-rule identities such as
``C(P/N1) = C(aP/N1) + C((1-a)P/(aP+N1))`` are encoded by splitting a term
into named nonnegative pieces (``Ca1 = Ca3 + Da`` is written ``Ca3 + Da``).

Naming: ``a``/``b`` suffixes are the two parts of a split message, ``D*``
and ``E*`` are the excess of a stronger receiver's rate over a weaker
one's for the same layer.
"""

import logging
from dataclasses import dataclass, field

from bounds import GROUP4_FAMILY2_MEMBERS, GROUP7_SPLIT_MEMBERS
from fme import LinSystem, eliminate_all, equivalent_sampled, parse_system, remove_redundant, substitute
from graphs import GroupMember, recompose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Derivation:
    name: str
    summary: str
    system: LinSystem
    eliminate: "tuple[str, ...]"
    target: LinSystem
    substitutions: "tuple[tuple[str, dict], ...]" = field(default=())


def _lines(*rows: str) -> str:
    return "\n".join(r for r in rows if r) + "\n"


def _nonneg_rows(*names: str) -> "list[str]":
    return [f"{n} >= 0" for n in names]


def _split_rows(total: str, *parts: str) -> "list[str]":
    s = " + ".join(parts)
    return [f"{s} - {total} <= 0", f"{s} - {total} >= 0"]


def group1_layered() -> Derivation:
    """Layer l carries a part of every message for receivers 1..l.

    Receiver i decodes layers 3 down to i, so layer l only carries rates of
    receivers that decode it. The projection is the empty-graph row of the
    prior inner bound, not the per-receiver row of the capacity region.
    """
    system = parse_system(_lines(
        "nonneg: B1 B2 B3",
        "vars: R1 R2 R3 R11 R12 R13 R22 R23 R33",
        "R11 <= B1",
        "R12 + R22 <= B2",
        "R13 + R23 + R33 <= B3",
        *_nonneg_rows("R11", "R12", "R13", "R22", "R23", "R33"),
    ))
    target = parse_system(_lines(
        "nonneg: B1 B2 B3",
        "vars: R1 R2 R3",
        "R3 <= B3",
        "R2 + R3 <= B2 + B3",
        "R1 + R2 + R3 <= B1 + B2 + B3",
        *_nonneg_rows("R1", "R2", "R3"),
    ))
    return Derivation(
        "group1-layered",
        "group 1, every layer split across the receivers that decode it",
        system,
        ("R11", "R12", "R22"),
        target,
        substitutions=(
            ("R13", {"R1": 1, "R11": -1, "R12": -1}),
            ("R23", {"R2": 1, "R22": -1}),
            ("R33", {"R3": 1}),
        ),
    )


def group1_unsplit() -> Derivation:
    """Successive decoding of x1(m1)+x2(m2)+x3(m3) without splits.

    A stronger receiver decodes the same layer at a higher rate (``E*``), so
    only the weakest decoder's condition per layer survives.
    """
    system = parse_system(_lines(
        "nonneg: B1 B2 B3 E21 E31 E32",
        "vars: R1 R2 R3",
        "R3 <= B3",
        "R3 <= B3 + E32",
        "R2 <= B2",
        "R3 <= B3 + E31",
        "R2 <= B2 + E21",
        "R1 <= B1",
        *_nonneg_rows("R1", "R2", "R3"),
    ))
    target = parse_system(_lines(
        "nonneg: B1 B2 B3 E21 E31 E32",
        "vars: R1 R2 R3",
        "R1 <= B1",
        "R2 <= B2",
        "R3 <= B3",
        *_nonneg_rows("R1", "R2", "R3"),
    ))
    return Derivation("group1-unsplit", "group 1, one subcodebook per message", system, (), target)


def group4_member(member: int) -> Derivation:
    """Group-4 dirty-paper scheme with M1 and M3 split across x3 and x1.

    ``Ca*``/``Cb*`` are the rates of the superposition layer and the
    dirty-paper layer at receivers 3 and 1; ``C2`` is x2 at receiver 2.
    """
    g = recompose(GroupMember(4, member))
    known = g.out_neighbors(1)
    r3 = " + R3" if 3 not in known else ""
    consts = "nonneg: Ca3 Cb3 Da Db C2 D2"
    if member in GROUP4_FAMILY2_MEMBERS:
        # Receiver 2 knows M3; part of it (R31) rides on x2 for receiver 1.
        r2 = "R2 + " if 2 not in known else ""
        system = parse_system(_lines(
            consts,
            "vars: R1 R2 R3 R1a R1b R31a R31b R32a R32b",
            "R31a + R32a <= Ca3",
            "R31b + R32b <= Cb3",
            "R2 <= C2",
            "R1a + R32a <= Ca3 + Da",
            "R31a + R32a <= Ca3 + Da",
            f"{r2}R31a + R31b <= C2 + D2",
            "R1b + R32b <= Cb3 + Db",
            "R31b + R32b <= Cb3 + Db",
            *_split_rows("R1", "R1a", "R1b"),
            *_split_rows("R3", "R31a", "R31b", "R32a", "R32b"),
            *_nonneg_rows("R2", "R1a", "R1b", "R31a", "R31b", "R32a", "R32b"),
        ))
        unknown = " + ".join(f"R{i}" for i in (1, 2, 3) if i not in known)
        target = parse_system(_lines(
            consts,
            "vars: R1 R2 R3",
            "R1 <= Ca3 + Da + Cb3 + Db",
            f"{unknown} <= Ca3 + Da + Cb3 + Db + C2 + D2",
            "R2 <= C2",
            "R3 <= Ca3 + Cb3",
            *_nonneg_rows("R1", "R2", "R3"),
        ))
        split = ("R1a", "R1b", "R31a", "R31b", "R32a", "R32b")
    else:
        system = parse_system(_lines(
            consts,
            "vars: R1 R2 R3 R1a R1b R3a R3b",
            "R3a <= Ca3",
            "R3b <= Cb3",
            "R2 <= C2",
            f"R1a{' + R3a' if r3 else ''} <= Ca3 + Da",
            "R2 <= C2 + D2" if 2 not in known else "",
            f"R1b{' + R3b' if r3 else ''} <= Cb3 + Db",
            *_split_rows("R1", "R1a", "R1b"),
            *_split_rows("R3", "R3a", "R3b"),
            *_nonneg_rows("R2", "R1a", "R1b", "R3a", "R3b"),
        ))
        target = parse_system(_lines(
            consts,
            "vars: R1 R2 R3",
            f"R1{r3} <= Ca3 + Da + Cb3 + Db",
            "R2 <= C2",
            "R3 <= Ca3 + Cb3",
            *_nonneg_rows("R1", "R2", "R3"),
        ))
        split = ("R1a", "R1b", "R3a", "R3b")
    return Derivation(f"group4-member{member}", f"group-4 dirty-paper scheme, {GroupMember(4, member).label()}",
                      system, split, target)


def group7_member(member: int) -> Derivation:
    """x1([m11, m31]) + x2([m2, m12, m32]) for the rate-split group-7 members.

    Members 4 and 6 send m12 XOR m32 on x2, so receiver 2 pays the longer
    of the two parts instead of their sum. ``B2``/``G3`` are x2's rates at
    receivers 2/3 and ``A3`` is x1's rate at receiver 3.
    """
    if member not in GROUP7_SPLIT_MEMBERS:
        raise ValueError(f"group-7 split derivation covers members 1, 3, 4, 6, not {member}")
    g = recompose(GroupMember(7, member))
    known = g.out_neighbors(1)
    xor = 3 in known
    rx2 = ["R2 + R12 <= B2", "R2 + R32 <= B2"] if xor else ["R2 + R12 + R32 <= B2"]
    rx1_x2 = " + ".join(v for v, owner in (("R2", 2), ("R12", 1), ("R32", 3)) if owner not in known)
    consts = "nonneg: A3 G3 B2 D1 Dx"
    system = parse_system(_lines(
        consts,
        "vars: R1 R2 R3 R11 R12 R31 R32",
        "R32 <= G3",
        "R31 <= A3",
        *rx2,
        f"{rx1_x2} <= B2 + D1",
        f"R11{'' if xor else ' + R31'} <= A3 + Dx",
        *_split_rows("R1", "R11", "R12"),
        *_split_rows("R3", "R31", "R32"),
        *_nonneg_rows("R2", "R11", "R12", "R31", "R32"),
    ))
    unknown = " + ".join(f"R{i}" for i in (1, 3) if i not in known)
    target = parse_system(_lines(
        consts,
        "vars: R1 R2 R3",
        f"R2 + {unknown} <= B2 + A3 + Dx",
        "R2 <= B2",
        "R2 + R3 <= B2 + A3",
        "R3 <= G3 + A3",
        *_nonneg_rows("R1", "R2", "R3"),
    ))
    return Derivation(f"group7-member{member}", f"group-7 rate-split scheme, {GroupMember(7, member).label()}",
                      system, ("R11", "R12", "R31", "R32"), target)


def group6_split() -> Derivation:
    """x1([m11, m2]) + x2([m12, m3]) for G16∪G21 with successive decoding.

    ``F2``/``G3`` are the layer rates at the receivers that need them; the
    ``E*`` excesses are what receiver 1 gains on the same layers. The
    projection is the capacity row with ``C(P/N1) = F2 + E1 + G3 + E3``.
    """
    consts = "nonneg: F2 E1 G3 E2 E3"
    system = parse_system(_lines(
        consts,
        "vars: R1 R2 R3 R11 R12",
        "R3 <= G3",
        "R3 <= G3 + E2",
        "R2 <= F2",
        "R12 + R3 <= G3 + E3",
        "R11 + R2 <= F2 + E1",
        *_split_rows("R1", "R11", "R12"),
        *_nonneg_rows("R2", "R3", "R11", "R12"),
    ))
    target = parse_system(_lines(
        consts,
        "vars: R1 R2 R3",
        "R1 + R2 + R3 <= F2 + E1 + G3 + E3",
        "R2 <= F2",
        "R3 <= G3",
        *_nonneg_rows("R1", "R2", "R3"),
    ))
    return Derivation("group6-split", "group 6, M1 split across both layers", system, ("R11", "R12"), target)


def builtins() -> "dict[str, Derivation]":
    out = {d.name: d for d in (group1_layered(), group1_unsplit(), group6_split())}
    for member in range(1, 9):
        d = group4_member(member)
        out[d.name] = d
    for member in sorted(GROUP7_SPLIT_MEMBERS):
        d = group7_member(member)
        out[d.name] = d
    return out


def project(d: Derivation) -> LinSystem:
    sys = d.system
    for var, expr in d.substitutions:
        sys = substitute(sys, var, expr)
    return remove_redundant(eliminate_all(sys, d.eliminate, prune=True))


def verify(d: Derivation, assignments: int = 100, seed: int = 0,
           grid: int = 20) -> "tuple[LinSystem, bool]":
    """Projected system and whether it matches the target on the sampled oracle."""
    projected = project(d)
    ok = equivalent_sampled(projected, d.target, assignments=assignments, seed=seed, grid=grid)
    logger.info("%s: %d rows after elimination, target %s", d.name, len(projected), "matches" if ok else "differs")
    return projected, ok
