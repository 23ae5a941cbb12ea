"""Max-min SINR downlink beamforming through a time-modulated 1-bit
transmissive surface: channel synthesis and estimation, the consensus
solver, the control-waveform layer and an experiment harness."""

from . import admm, channel, config, estimation, oracles, tma
from .admm import SolveTrace, SolverOptions, init_state, project_feasible, solve
from .channel import (
    ChannelSet,
    index_vector_a,
    index_vector_b,
    per_element_power,
    sample_channel,
    sinr,
    sinr_all,
    steering_vector,
)
from .config import SystemConfig, default_config, place_users

__version__ = "0.1.0"

__all__ = [
    "ChannelSet",
    "SolveTrace",
    "SolverOptions",
    "SystemConfig",
    "admm",
    "channel",
    "config",
    "default_config",
    "estimation",
    "index_vector_a",
    "index_vector_b",
    "init_state",
    "oracles",
    "per_element_power",
    "place_users",
    "project_feasible",
    "sample_channel",
    "sinr",
    "sinr_all",
    "solve",
    "steering_vector",
    "tma",
]
