"""
Chains

Modules:
- builders: chain alpha and chain beta schedules
- critical: critical-server finder
- indistinguishability: observer views and trace classes
- search: contradiction search over chains and random schedules
"""

from .builders import ChainSpec, build_chain_alpha, build_chain_beta, chain_config
from .critical import CriticalServerReport, find_critical_server
from .indistinguishability import indistinguishability_classes
from .search import SearchReport, contradiction_search
