from twirlsim.protocol.enumeration import FailureEstimate, TruncationBudgetExceeded, run_enumeration
from twirlsim.protocol.montecarlo import run_montecarlo_pta, simulate_trials, worker_count
from twirlsim.protocol.schedule import (
    ANCILLAS,
    BELL_STATES,
    DATA,
    DEFAULT_LAYOUT,
    CycleSchedule,
    Gate,
    ProtocolConfig,
    SimMode,
    Step,
    build_schedule,
    idle_noise,
    initial_state,
    predict_bell,
)
from twirlsim.protocol.trial import TrialOutcome, run_cycle, run_trial, trial_rng

__all__ = [
    "ANCILLAS", "BELL_STATES", "DATA", "DEFAULT_LAYOUT", "CycleSchedule", "FailureEstimate",
    "Gate", "ProtocolConfig", "SimMode", "Step", "TrialOutcome", "TruncationBudgetExceeded",
    "build_schedule", "idle_noise", "initial_state", "predict_bell", "run_cycle",
    "run_enumeration", "run_montecarlo_pta", "run_trial", "simulate_trials", "trial_rng",
    "worker_count",
]
