"""
Utility modules for solver reporting
"""

from .reporting import (
    print_section,
    print_subsection,
    print_metric,
    print_solve_summary,
    format_quarter,
    format_ordering,
    trace_table,
    summary_table,
)

__all__ = [
    'print_section',
    'print_subsection',
    'print_metric',
    'print_solve_summary',
    'format_quarter',
    'format_ordering',
    'trace_table',
    'summary_table',
]
