"""Brute-force reference engines.

These trade time for trust: they enumerate entire state and action spaces
with no pruning and no shared structure with the production recursion
beyond the state transition itself, so agreement is meaningful evidence.

solve_exhaustive runs backward induction over every (slot, pending subset,
dependency record, channel state) combination, reachable or not, taking the
best feasible batch by direct enumeration.

enumerate_single_schedules evaluates every deterministic single-packet rule
mapping (slot, channel state) to transmit/wait by plain policy evaluation,
with no maximization anywhere, and reports the per-state elementwise best.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, CostModel
from .media import MediaTrace, Packet, validate_trace, TraceValidationError
from .solver import JointState, _index_for, _check_common


@dataclass(eq=False)
class ExhaustiveSolution:
    trace: MediaTrace
    channel: ChannelModel
    cost: CostModel
    alpha: float
    lam: float
    # values[t]: (pending mask, dep mask) -> ndarray over channel states
    values: list[dict]
    # actions[t]: (pending mask, dep mask, h) -> transmit mask
    actions: list[dict]
    states_enumerated: list[int]
    actions_evaluated: list[int]
    name: str = "oracle"

    def decide(self, state: JointState) -> list[int]:
        idx = _index_for(self.trace)
        pending, dmask = idx.state_masks(state)
        tx = self.actions[state.t][(pending, dmask, state.channel)]
        return [idx.ids[i] for i in idx.topo if tx >> i & 1]

    def state_value(self, state: JointState) -> float:
        idx = _index_for(self.trace)
        pending, dmask = idx.state_masks(state)
        return float(self.values[state.t][(pending, dmask)][state.channel])

    def initial_values(self) -> np.ndarray:
        idx = _index_for(self.trace)
        return self.values[0][(idx.arrive_mask[0], 0)].copy()

    def expected_initial_value(self) -> float:
        return float(self.channel.initial @ self.initial_values())

    def to_dump_dict(self) -> dict:
        idx = _index_for(self.trace)
        slots = []
        for t in range(idx.horizon + 1):
            items = {}
            for (bmask, dmask), vec in self.values[t].items():
                ids = ",".join(str(x) for x in sorted(idx.ids_of(bmask)))
                deps = ",".join(
                    f"{pid}:{int(bit)}" for pid, bit in idx.deps_tuple(t, dmask)
                )
                for h in range(self.channel.n_states):
                    items[f"B={ids}|D={deps}|h={h}"] = float(vec[h])
            slots.append(
                {
                    "t": t,
                    "states_enumerated": self.states_enumerated[t],
                    "actions_evaluated": self.actions_evaluated[t],
                    "values": items,
                }
            )
        return {
            "engine": "exhaustive",
            "alpha": self.alpha,
            "lambda": self.lam,
            "cost": self.cost.kind,
            "initial_values": [float(x) for x in self.initial_values()],
            "slots": slots,
        }


def _subsets(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def solve_exhaustive(
    trace: MediaTrace,
    channel: ChannelModel,
    cost: CostModel,
    alpha: float,
    lam: float,
    max_packets: int = 14,
) -> ExhaustiveSolution:
    """Optimal values over the full state space, no reachability pruning."""
    _check_common(trace, alpha, lam)
    if len(trace.packets) > max_packets:
        raise ValueError(
            f"{len(trace.packets)} packets exceed the exhaustive limit {max_packets}"
        )
    if cost.kind == "convex":
        bad = validate_trace(trace, require_uniform_size=True)
        if bad:
            raise TraceValidationError(bad)

    idx = _index_for(trace)
    hz = idx.horizon
    n_h = channel.n_states
    transition = channel.transition
    values: list[dict] = [{} for _ in range(hz + 2)]
    actions: list[dict] = [{} for _ in range(hz + 1)]
    states_enumerated = [0] * (hz + 1)
    actions_evaluated = [0] * (hz + 1)
    values[hz + 1][(0, 0)] = np.zeros(n_h)

    for t in range(hz, -1, -1):
        live = idx.live_mask[t]
        n_dep = len(idx.dep_slots[t])
        states_enumerated[t] = n_h * (1 << n_dep) * (1 << bin(live).count("1"))
        for pending in _subsets(live):
            for dmask in range(1 << n_dep):
                sched = idx.schedulable(t, pending, dmask)
                best = np.full(n_h, -np.inf)
                best_tx = [0] * n_h
                n_batches = 0
                for tx in _subsets(sched):
                    feasible = True
                    mm = tx
                    while mm:
                        low = mm & -mm
                        if idx.parent_mask[low.bit_length() - 1] & pending & ~tx:
                            feasible = False
                            break
                        mm ^= low
                    if not feasible:
                        continue
                    n_batches += 1
                    nxt_pending = (pending & ~tx & ~idx.expire_mask[t]) | (
                        idx.arrive_mask[t + 1] if t + 1 <= hz else 0
                    )
                    nxt_dmask = idx.dep_after(t, dmask, pending, tx)
                    cont = alpha * (transition @ values[t + 1][(nxt_pending, nxt_dmask)])
                    gain = 0.0
                    mm = tx
                    while mm:
                        low = mm & -mm
                        gain += idx.q[low.bit_length() - 1]
                        mm ^= low
                    for h in range(n_h):
                        cand = (
                            gain
                            - lam * idx.batch_cost(tx, channel.states[h], cost)
                            + cont[h]
                        )
                        if cand > best[h]:
                            best[h] = cand
                            best_tx[h] = tx
                values[t][(pending, dmask)] = best
                for h in range(n_h):
                    actions[t][(pending, dmask, h)] = best_tx[h]
                actions_evaluated[t] += n_batches * n_h
    return ExhaustiveSolution(
        trace=trace,
        channel=channel,
        cost=cost,
        alpha=alpha,
        lam=lam,
        values=values,
        actions=actions,
        states_enumerated=states_enumerated,
        actions_evaluated=actions_evaluated,
    )


def enumerate_single_schedules(
    packet: Packet,
    channel: ChannelModel,
    cost: CostModel,
    alpha: float,
    lam: float,
    max_cells: int = 16,
) -> np.ndarray:
    """Best value per channel state over all deterministic (slot, state) rules.

    Each rule fixes transmit-or-wait for every cell of the live window; it
    is scored by policy evaluation alone. The elementwise maximum over all
    rules is what any state-feedback scheduler can reach.
    """
    window = packet.deadline - packet.arrival + 1
    n_h = channel.n_states
    cells = window * n_h
    if cells > max_cells:
        raise ValueError(f"{cells} rule cells exceed the enumeration limit {max_cells}")
    net = np.array(
        [packet.distortion - lam * cost.cost(packet.size_bits, s) for s in channel.states]
    )
    transition = channel.transition
    best = np.full(n_h, -np.inf)
    for rule_bits in range(1 << cells):
        future = np.zeros(n_h)
        for row in range(window - 1, -1, -1):
            held = alpha * (transition @ future)
            current = np.empty(n_h)
            for h in range(n_h):
                if rule_bits >> (row * n_h + h) & 1:
                    current[h] = net[h]
                else:
                    current[h] = held[h]
            future = current
        best = np.maximum(best, future)
    return best
