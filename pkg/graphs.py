"""Side-information graphs and their group/member classification.

Receivers are numbered by noise rank (1 is the strongest). An arc ``(i, j)``
means receiver ``i`` knows message ``M_j`` a priori. For three receivers every
graph is the union of a *leader* (arcs from a weaker to a stronger receiver,
``i > j``) and a *member subgraph* (arcs from a stronger to a weaker receiver,
``i < j``); the eight leaders index the groups and the eight subgraphs index
the members, giving the 8 x 8 classification of all 64 configurations.
"""

import itertools
from dataclasses import dataclass

import networkx as nx

MAX_ENUMERATE_RECEIVERS = 5  # 2^(Q(Q-1)) graphs; Q=5 is already ~1M.

# Canonical index table. Leaders hold weaker->stronger arcs, subgraphs the
# mirrored stronger->weaker arcs, with the same index for mirrored sets.
LEADER_ARCS = {
    1: frozenset(),
    2: frozenset({(3, 2)}),
    3: frozenset({(2, 1)}),
    4: frozenset({(3, 1)}),
    5: frozenset({(2, 1), (3, 2)}),
    6: frozenset({(2, 1), (3, 1)}),
    7: frozenset({(3, 1), (3, 2)}),
    8: frozenset({(2, 1), (3, 1), (3, 2)}),
}
SUBGRAPH_ARCS = {
    1: frozenset(),
    2: frozenset({(2, 3)}),
    3: frozenset({(1, 2)}),
    4: frozenset({(1, 3)}),
    5: frozenset({(1, 2), (2, 3)}),
    6: frozenset({(1, 2), (1, 3)}),
    7: frozenset({(1, 3), (2, 3)}),
    8: frozenset({(1, 2), (1, 3), (2, 3)}),
}
_LEADER_INDEX = {arcs: k for k, arcs in LEADER_ARCS.items()}
_SUBGRAPH_INDEX = {arcs: k for k, arcs in SUBGRAPH_ARCS.items()}

SOLVED_GROUPS = frozenset({1, 2, 3, 5, 6, 8})
SOLVED_GROUP7_MEMBERS = frozenset({2, 5, 7, 8})

# Four-receiver leader whose capacity region is fourrx_capacity in bounds.py.
FOUR_RECEIVER_LEADER_ARCS = frozenset({(2, 1), (3, 2), (4, 2), (4, 3)})


class GraphError(ValueError):
    """Malformed side-information graph or an operation outside its domain."""


@dataclass(frozen=True)
class SideInfoGraph:
    num_receivers: int
    arcs: "frozenset[tuple[int, int]]"

    def out_neighbors(self, i: int) -> "frozenset[int]":
        """O_i: the messages receiver ``i`` knows a priori."""
        return frozenset(j for (k, j) in self.arcs if k == i)

    def receivers(self) -> "range":
        return range(1, self.num_receivers + 1)

    def sorted_arcs(self) -> "list[tuple[int, int]]":
        return sorted(self.arcs)

    def to_digraph(self) -> "nx.DiGraph":
        g = nx.DiGraph()
        g.add_nodes_from(self.receivers())
        g.add_edges_from(self.arcs)
        return g

    def to_json(self) -> dict:
        return {"Q": self.num_receivers, "arcs": [list(a) for a in self.sorted_arcs()]}


@dataclass(frozen=True)
class GroupMember:
    group: int
    member: int

    def label(self) -> str:
        return f"G1{self.group}∪G2{self.member}"


def make_graph(num_receivers: int, arcs) -> SideInfoGraph:
    """Validate and build a graph; duplicate arcs collapse to one."""
    if num_receivers < 2:
        raise GraphError(f"need at least 2 receivers, got {num_receivers}")
    clean = set()
    for arc in arcs:
        i, j = (int(v) for v in arc)
        if i == j:
            raise GraphError(f"self-loop ({i}, {j}): a receiver cannot know its own request")
        if not (1 <= i <= num_receivers and 1 <= j <= num_receivers):
            raise GraphError(f"arc ({i}, {j}) is outside receivers 1..{num_receivers}")
        clean.add((i, j))
    return SideInfoGraph(num_receivers, frozenset(clean))


def _require_three(g: SideInfoGraph) -> None:
    if g.num_receivers != 3:
        raise GraphError(f"classification is defined for 3 receivers, got {g.num_receivers}")


def decompose(g: SideInfoGraph) -> GroupMember:
    """Split a three-receiver graph into its (group, member) indices."""
    _require_three(g)
    leader = frozenset(a for a in g.arcs if a[0] > a[1])
    subgraph = frozenset(a for a in g.arcs if a[0] < a[1])
    return GroupMember(_LEADER_INDEX[leader], _SUBGRAPH_INDEX[subgraph])


def recompose(gm: GroupMember) -> SideInfoGraph:
    if gm.group not in LEADER_ARCS or gm.member not in SUBGRAPH_ARCS:
        raise GraphError(f"unknown group/member ({gm.group}, {gm.member})")
    return SideInfoGraph(3, LEADER_ARCS[gm.group] | SUBGRAPH_ARCS[gm.member])


def capacity_known(gm: GroupMember) -> bool:
    return gm.group in SOLVED_GROUPS or (gm.group == 7 and gm.member in SOLVED_GROUP7_MEMBERS)


def relabel(g: SideInfoGraph, mapping: "dict[int, int]") -> SideInfoGraph:
    """Rename receivers through ``mapping`` (identity for missing keys)."""
    return make_graph(
        g.num_receivers,
        [(mapping.get(i, i), mapping.get(j, j)) for (i, j) in g.arcs],
    )


def induced_acyclic_subgraphs(g: SideInfoGraph) -> "list[tuple[int, ...]]":
    """Nonempty vertex subsets whose induced arcs have no directed cycle.

    Shortlex order: by size, then lexicographically within a size. Singletons
    come first, e.g. ``[(1,), (2,), (3,), (1, 2), (1, 3)]`` when receivers 2
    and 3 know each other's messages.
    """
    dg = g.to_digraph()
    out = []
    for size in range(1, g.num_receivers + 1):
        for subset in itertools.combinations(g.receivers(), size):
            if nx.is_directed_acyclic_graph(dg.subgraph(subset)):
                out.append(subset)
    return out


def conjecture_condition(leader: SideInfoGraph) -> bool:
    """Whether every known message is also known to the receivers in between.

    For each arc (i -> j) of the leader, every receiver q with j < q < i must
    also know M_j.
    """
    for (i, j) in leader.arcs:
        if j > i:
            raise GraphError(f"arc ({i}, {j}) points to a weaker receiver; not a leader")
    for (i, j) in leader.arcs:
        for q in range(j + 1, i):
            if j not in leader.out_neighbors(q):
                return False
    return True


def enumerate_all(num_receivers: int) -> "list[SideInfoGraph]":
    """Every graph on ``num_receivers`` vertices once, in arc-bitmask order."""
    if num_receivers < 2:
        raise GraphError(f"need at least 2 receivers, got {num_receivers}")
    if num_receivers > MAX_ENUMERATE_RECEIVERS:
        raise GraphError(
            f"refusing to enumerate {num_receivers} receivers (limit {MAX_ENUMERATE_RECEIVERS})"
        )
    all_arcs = [(i, j) for i in range(1, num_receivers + 1)
                for j in range(1, num_receivers + 1) if i != j]
    graphs = []
    for mask in range(1 << len(all_arcs)):
        arcs = frozenset(a for bit, a in enumerate(all_arcs) if mask >> bit & 1)
        graphs.append(SideInfoGraph(num_receivers, arcs))
    return graphs


def classification_table() -> "dict[int, list[GroupMember]]":
    """Group index -> its members, over all 64 three-receiver graphs."""
    table = {k: [] for k in LEADER_ARCS}
    for g in enumerate_all(3):
        gm = decompose(g)
        table[gm.group].append(gm)
    for members in table.values():
        members.sort(key=lambda gm: gm.member)
    return table


def construction_a(leader: SideInfoGraph) -> "list[tuple[int, tuple[int, ...]]]":
    """Subcodebooks of the multiplexing construction for a group leader.

    A subcodebook is associated with receiver ``i`` when some message in
    ``{M_i} ∪ K_i`` is unknown to every weaker receiver; it multiplexes
    ``M_i`` with ``K_i``. Returned strongest receiver first as
    ``(receiver, messages)``; superposing them gives the transmit signal.
    """
    out = []
    q = leader.num_receivers
    for i in leader.receivers():
        carried = tuple(sorted({i} | leader.out_neighbors(i)))
        weaker = range(i + 1, q + 1)
        if i == q or any(all(m not in leader.out_neighbors(w) for w in weaker) for m in carried):
            out.append((i, carried))
    return out
