"""Experiment harness and command line interface."""

from .config import ConfigError, ExperimentConfig, GraphSource, parse_graph_spec
from .experiments import (
    ExperimentRecord,
    read_records,
    run_compare,
    run_compute,
    run_sequential,
    run_tc_bounds,
    write_records,
)
