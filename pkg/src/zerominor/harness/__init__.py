"""Oracles, experiments, the minor census and the command line."""

from .census import MinorCensus, minor_census
from .experiment import ExperimentRecord, run_experiment
from .oracles import bsgs_dlog

__all__ = ["MinorCensus", "minor_census", "ExperimentRecord", "run_experiment", "bsgs_dlog"]
