"""
Histories

Modules:
- model: operation records, histories, well-formedness
- precedence: cluster precedence graphs (networkx)
- atomicity: exact atomicity checker and witness verification
- oracle: brute-force checker and random small histories
- mwa: MWA0..MWA4 property checks
"""

from .atomicity import AtomicityVerdict, ViolationCertificate, check_atomic, verify_witness
from .model import History, OpRecord, check_wellformed, validate_history
from .mwa import MWAReport, check_mwa
from .oracle import brute_force_atomic, random_history
