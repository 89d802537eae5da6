"""Transmission-priority structure over pending packets.

A packet j outranks k when sending j first never hurts: either k depends on
j, or j dominates k in distortion, urgency and per-state transmission cost
while covering k's dependents.
The pairwise tests are sufficient conditions, so the induced graph can leave
genuinely ordered pairs unconnected; everything downstream only relies on
the edges that are present.

The graph drives two things: the in-slot emission order, and an enumeration
of the pending-set states a priority-respecting policy can ever occupy. The
latter is the family of upper sets of the order, built by peeling roots.
When no three packets are mutually unordered its nonempty-set count is the
packet count plus the number of unordered pairs (the disconnection degree);
larger unordered clusters push the count above that.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .media import MediaTrace, descendants


@dataclass(frozen=True)
class PriorityGraph:
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]  # (higher, lower), transitively reduced

    def predecessors(self) -> dict[int, frozenset[int]]:
        pred: dict[int, set[int]] = {n: set() for n in self.nodes}
        for a, b in self.edges:
            pred[b].add(a)
        return {n: frozenset(s) for n, s in pred.items()}

    def successors(self) -> dict[int, frozenset[int]]:
        succ: dict[int, set[int]] = {n: set() for n in self.nodes}
        for a, b in self.edges:
            succ[a].add(b)
        return {n: frozenset(s) for n, s in succ.items()}


@dataclass(frozen=True)
class StateTree:
    root: PriorityGraph
    nodes: frozenset[PriorityGraph]
    edges: frozenset[tuple[frozenset[int], frozenset[int]]]

    @property
    def distinct_nonempty_count(self) -> int:
        return sum(1 for g in self.nodes if g.nodes)


def higher_priority(j, k, trace: MediaTrace) -> str:
    """Order two packets: 'j_before_k', 'k_before_j', or 'incomparable'.

    The attribute test needs j to dominate k's transmission cost in every
    channel state as well, which for both cost kinds reduces to j being no
    larger; with equal sizes the clause is vacuous. Attribute ties in both
    directions resolve toward the lower id so the relation stays
    antisymmetric.
    """
    if j.id == k.id:
        raise ValueError("cannot order a packet against itself")
    desc_j = descendants(trace, j.id)
    desc_k = descendants(trace, k.id)
    if k.id in desc_j:
        return "j_before_k"
    if j.id in desc_k:
        return "k_before_j"
    jk = (
        j.distortion >= k.distortion
        and j.deadline <= k.deadline
        and j.size_bits <= k.size_bits
        and desc_k <= desc_j
    )
    kj = (
        k.distortion >= j.distortion
        and k.deadline <= j.deadline
        and k.size_bits <= j.size_bits
        and desc_j <= desc_k
    )
    if jk and kj:
        return "j_before_k" if j.id < k.id else "k_before_j"
    if jk:
        return "j_before_k"
    if kj:
        return "k_before_j"
    return "incomparable"


def priority_pairs(trace: MediaTrace, ids) -> set[tuple[int, int]]:
    """All ordered pairs (a, b) with a outranking b among the given ids."""
    ids = sorted(ids)
    out: set[tuple[int, int]] = set()
    for pos, a in enumerate(ids):
        for b in ids[pos + 1 :]:
            verdict = higher_priority(trace.by_id[a], trace.by_id[b], trace)
            if verdict == "j_before_k":
                out.add((a, b))
            elif verdict == "k_before_j":
                out.add((b, a))
    return out


def build_priority_graph(ids, trace: MediaTrace) -> PriorityGraph:
    """Pairwise-ordered graph over ids, transitively reduced."""
    ids = frozenset(ids)
    unknown = ids - set(trace.by_id)
    if unknown:
        raise ValueError(f"unknown packet ids {sorted(unknown)}")
    relation = priority_pairs(trace, ids)
    closure = _transitive_closure(ids, relation)
    edges = _reduce(ids, relation, closure)
    return PriorityGraph(nodes=ids, edges=frozenset(edges))


def _transitive_closure(ids, relation) -> dict[int, set[int]]:
    succ: dict[int, set[int]] = {n: set() for n in ids}
    for a, b in relation:
        succ[a].add(b)
    reach: dict[int, set[int]] = {}
    for n in ids:
        seen: set[int] = set()
        frontier = list(succ[n])
        while frontier:
            x = frontier.pop()
            if x in seen:
                continue
            seen.add(x)
            frontier.extend(succ[x])
        reach[n] = seen
    return reach

def _reduce(ids, relation, closure) -> set[tuple[int, int]]:
    # transitive reduction: keep (a, b) unless some x satisfies a -> x -> b
    out = set()
    for a, b in relation:
        if not any(x != b and b in closure[x] for x in closure[a]):
            out.add((a, b))
    return out


def roots(pg: PriorityGraph) -> frozenset[int]:
    """Nodes with no higher-ranked node in the graph."""
    blocked = {b for _, b in pg.edges}
    return frozenset(pg.nodes - blocked)


def disconnection_degree(pg: PriorityGraph) -> int:
    """Unordered node pairs with no directed path either way."""
    reach = _graph_closure(pg)
    nodes = sorted(pg.nodes)
    count = 0
    for pos, a in enumerate(nodes):
        for b in nodes[pos + 1 :]:
            if b not in reach[a] and a not in reach[b]:
                count += 1
    return count


def _graph_closure(pg: PriorityGraph) -> dict[int, set[int]]:
    succ = pg.successors()
    reach: dict[int, set[int]] = {}
    for n in pg.nodes:
        seen: set[int] = set()
        frontier = list(succ[n])
        while frontier:
            x = frontier.pop()
            if x in seen:
                continue
            seen.add(x)
            frontier.extend(succ[x])
        reach[n] = seen
    return reach


def tree_node_sets(nodes, pred: dict[int, frozenset[int]]) -> set[frozenset[int]]:
    """Distinct pending sets obtained by repeatedly removing current roots.

    pred maps each node to the nodes ranked above it; only predecessors
    inside the current set block a node from being a root.
    """
    start = frozenset(nodes)
    seen: set[frozenset[int]] = {start}
    queue: deque[frozenset[int]] = deque([start])
    while queue:
        current = queue.popleft()
        for n in current:
            if pred[n] & current:
                continue
            child = current - {n}
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return seen


def build_state_tree(pg: PriorityGraph) -> StateTree:
    """Enumerate the pending sets reachable by peeling roots off pg.

    Children that coincide as sets are merged, so the result is a DAG over
    the distinct upper sets of the order. When no three nodes are mutually
    unordered, the nonempty count is |nodes| + disconnection_degree(pg).
    """
    closure = _graph_closure(pg)
    pred: dict[int, set[int]] = {n: set() for n in pg.nodes}
    for a in pg.nodes:
        for b in closure[a]:
            pred[b].add(a)
    pred_f = {n: frozenset(s) for n, s in pred.items()}

    graphs: dict[frozenset[int], PriorityGraph] = {}
    edges: set[tuple[frozenset[int], frozenset[int]]] = set()
    start = pg.nodes
    graphs[start] = pg
    queue: deque[frozenset[int]] = deque([start])
    while queue:
        current = queue.popleft()
        for n in current:
            if pred_f[n] & current:
                continue
            child = current - {n}
            edges.add((current, child))
            if child not in graphs:
                graphs[child] = _induced(pg, closure, child)
                queue.append(child)
    return StateTree(
        root=pg, nodes=frozenset(graphs.values()), edges=frozenset(edges)
    )


def _induced(pg: PriorityGraph, closure: dict[int, set[int]], nodes: frozenset[int]) -> PriorityGraph:
    relation = {(a, b) for a in nodes for b in closure[a] if b in nodes}
    sub_closure = {n: {b for b in closure[n] if b in nodes} for n in nodes}
    edges = _reduce(nodes, relation, sub_closure)
    return PriorityGraph(nodes=nodes, edges=frozenset(edges))


def reachable_states(trace: MediaTrace, t: int) -> tuple[set[frozenset[int]], PriorityGraph]:
    """Pending-set states a priority-respecting policy can occupy at slot t.

    Returns the states (packets arriving exactly at t merged into each) and
    the auxiliary graph over packets that arrived before t and are still
    within deadline; edges additionally require the higher-ranked packet not
    to arrive later, since a later arrival cannot precede in time.
    """
    if t < 0:
        raise ValueError("slot must be nonnegative")
    nodes = frozenset(
        p.id for p in trace.packets if p.arrival < t <= p.deadline
    )
    relation = {
        (a, b)
        for (a, b) in priority_pairs(trace, nodes)
        if trace.by_id[a].arrival <= trace.by_id[b].arrival
    }
    closure = _transitive_closure(nodes, relation)
    edges = _reduce(nodes, relation, closure)
    aux = PriorityGraph(nodes=nodes, edges=frozenset(edges))

    pred: dict[int, set[int]] = {n: set() for n in nodes}
    for a in nodes:
        for b in closure[a]:
            pred[b].add(a)
    pre = tree_node_sets(nodes, {n: frozenset(s) for n, s in pred.items()})
    arriving = trace.arrivals(t)
    states = {frozenset(s | arriving) for s in pre}
    return states, aux


# ---------------------------------------------------------------------------
# DOT rendering
# ---------------------------------------------------------------------------


def pg_to_dot(pg: PriorityGraph, name: str = "priorities") -> str:
    lines = [f"digraph {name} {{"]
    for n in sorted(pg.nodes):
        lines.append(f'  p{n} [label="{n}"];')
    for a, b in sorted(pg.edges):
        lines.append(f"  p{a} -> p{b};")
    lines.append("}")
    return "\n".join(lines)


def tree_to_dot(tree: StateTree, name: str = "pending_sets") -> str:
    def set_id(s: frozenset[int]) -> str:
        return "s_" + ("_".join(str(x) for x in sorted(s)) if s else "empty")

    def label(s: frozenset[int]) -> str:
        return "{" + ",".join(str(x) for x in sorted(s)) + "}"

    lines = [f"digraph {name} {{"]
    for g in sorted(tree.nodes, key=lambda g: (len(g.nodes), sorted(g.nodes))):
        lines.append(f'  {set_id(g.nodes)} [label="{label(g.nodes)}"];')
    for parent, child in sorted(tree.edges, key=lambda e: (len(e[0]), sorted(e[0]), sorted(e[1]))):
        lines.append(f"  {set_id(parent)} -> {set_id(child)};")
    lines.append("}")
    return "\n".join(lines)
