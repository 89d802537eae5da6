"""Canned experiment setups.

Two fixtures used by the command line tools and the evaluation suite:

* volatile: a sticky two-state channel whose bad state is expensive but
  still myopically profitable, with staggered independent packets. Policies
  that ignore the future keep buying bad slots here.
* standard: a two-GOP chain-dependent trace on a milder channel with the
  exponential rate cost, exercising dependencies and batch scheduling.
"""

from __future__ import annotations

import json
import pathlib

import numpy as np

from .channel import ChannelModel, ChannelState, CostModel, dump_channel
from .media import MediaTrace, Packet, dump_trace, synth_trace


def volatile_scenario() -> tuple[MediaTrace, ChannelModel, CostModel, float, float]:
    """Independent packets on a channel that swings between cheap and costly."""
    packets = []
    rng = np.random.default_rng(7)
    for j in range(6):
        arrival = j if j < 4 else j - 2
        packets.append(
            Packet(
                id=j + 1,
                size_bits=1.0,
                distortion=10.0 + float(rng.integers(0, 4)),
                arrival=arrival,
                deadline=arrival + 4,
            )
        )
    trace = MediaTrace(packets=tuple(packets))
    channel = ChannelModel(
        states=(
            ChannelState(id=0, gain=0.25, rate=0.125, loss_prob=0.0),
            ChannelState(id=1, gain=4.0, rate=1.0, loss_prob=0.0),
        ),
        transition=np.array([[0.65, 0.35], [0.2, 0.8]]),
        initial=np.array([0.5, 0.5]),
    )
    return trace, channel, CostModel(kind="linear"), 0.95, 1.0


def standard_scenario() -> tuple[MediaTrace, ChannelModel, CostModel, float, float]:
    """Chain-dependent GOP traffic with the exponential rate cost."""
    trace = synth_trace(
        n_gops=2,
        frames_per_gop=3,
        slots_per_frame=2,
        distortion_profile=(9.0, 6.0, 4.0),
        seed=11,
    )
    channel = ChannelModel(
        states=(
            ChannelState(id=0, gain=0.6, rate=0.5, loss_prob=0.05),
            ChannelState(id=1, gain=2.5, rate=1.2, loss_prob=0.01),
        ),
        transition=np.array([[0.6, 0.4], [0.3, 0.7]]),
        initial=np.array([0.4, 0.6]),
    )
    return trace, channel, CostModel(kind="convex", slot_duration=2.0), 0.9, 1.0


SCENARIOS = {"volatile": volatile_scenario, "standard": standard_scenario}


def save_scenario(name: str, out_dir) -> dict:
    """Write trace.json, channel.json and params.json; returns the params."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; pick from {sorted(SCENARIOS)}")
    trace, channel, cost, alpha, lam = SCENARIOS[name]()
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trace.json").write_text(dump_trace(trace))
    (out / "channel.json").write_text(dump_channel(channel))
    params = {
        "scenario": name,
        "cost": cost.kind,
        "slot_duration": cost.slot_duration,
        "alpha": alpha,
        "lambda": lam,
    }
    (out / "params.json").write_text(json.dumps(params, indent=2) + "\n")
    return params
