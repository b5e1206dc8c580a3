"""Purification (EPP) and concentration (ECP) protocols, analytic and simulated."""
from .ecp import (
    MAXIMAL,
    EcpClass,
    EcpNode,
    EcpResult,
    Maximal,
    Residual,
    ecp_dof_step,
    ecp_round_formulas,
    ecp_round_simulated,
    ecp_success_probability,
    ecp_success_simulated,
)
from .epp import (
    EppEnsemble,
    EppRoundResult,
    EppStep,
    epp_iterate,
    epp_iterate_simulated,
    epp_recurrence,
    epp_round_simulated,
)
from .sampling import EcpRun, EppRun, SampleStats, sample_ecp, sample_epp, sample_protocol
