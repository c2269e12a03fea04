"""
ASAPT Kernel - Acyclic Subgraph Above the Poljak-Turzik bound
"""

__version__ = "1.0.0"
