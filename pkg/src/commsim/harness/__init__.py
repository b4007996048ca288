"""Protocol execution with exact bit accounting."""
from .ledger import BitLedger, Channel, Message
from .smp import SimulationResult, SMPInstance, charged_bits, run_smp, simulate_scenario
from .twoway import TwoWayProtocol, equality_protocol, run_twoway, twoway_to_smp
from .yao import (CompiledProtocol, QuantumProtocolSpec, simulate_twoway_quantum,
                  yao_compile)

__all__ = [
    "BitLedger", "Channel", "Message", "SimulationResult", "SMPInstance", "charged_bits",
    "run_smp", "simulate_scenario", "TwoWayProtocol", "equality_protocol", "run_twoway",
    "twoway_to_smp", "CompiledProtocol", "QuantumProtocolSpec", "simulate_twoway_quantum",
    "yao_compile",
]
