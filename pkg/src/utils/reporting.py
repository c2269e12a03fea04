"""
Reporting and formatting utilities for solver runs

Provides consistent formatting for section headers, metrics, reduction
traces and benchmark tables.
"""

import pandas as pd
from typing import Any, Dict, List, Optional, Sequence


def print_section(title: str, width: int = 70):
    """Print a major section header."""
    print("\n" + "="*width)
    print(title.upper())
    print("="*width)


def print_subsection(title: str, width: int = 70):
    """Print a subsection header."""
    print(f"\n{title}")
    print("-"*width)


def print_metric(name: str, value: Any, indent: int = 2):
    """Print a single metric with consistent formatting."""
    spaces = " " * indent
    print(f"{spaces}{name}: {value}")


def format_quarter(q: int) -> str:
    """Format a quarter-unit score as arcs, e.g. 26 -> '6.50'."""
    return f"{q / 4:.2f}"


def format_ordering(order: Sequence[int], limit: int = 20) -> str:
    """Space-separated ordering, truncated after `limit` vertices."""
    head = " ".join(str(v) for v in order[:limit])
    return head if len(order) <= limit else f"{head} ... ({len(order)} total)"


def trace_table(steps: Sequence[Any], initial_k: Optional[int] = None) -> pd.DataFrame:
    """
    Tabulate reduction steps.

    Args:
        steps: RuleApplication objects
        initial_k: Starting parameter; adds a running k column when given

    Returns:
        DataFrame with one row per step
    """
    rows = []
    k = initial_k
    for i, step in enumerate(steps, start=1):
        row = {
            'step': i,
            'rule': step.rule.name,
            'removed': ",".join(str(v) for v in step.removed),
            'added': ",".join(str(v) for v in step.added),
            'k_delta': step.k_delta,
        }
        if k is not None:
            k -= step.k_delta
            row['k_after'] = k
        rows.append(row)
    return pd.DataFrame(rows, columns=None if rows else ['step', 'rule', 'removed', 'added', 'k_delta'])


def summary_table(rows: List[Dict[str, Any]], index: Optional[str] = None) -> pd.DataFrame:
    """
    Create and print a summary table from result dicts.

    Args:
        rows: One dict per run (same keys)
        index: Optional column to use as the index

    Returns:
        DataFrame with the summary
    """
    summary = pd.DataFrame(rows)
    if index is not None and index in summary.columns:
        summary = summary.set_index(index)
    print(summary.to_string())
    return summary


def print_solve_summary(result: Any, instance: Any, verbose_trace: bool = False):
    """
    Print the outcome of dp_solver.solve().

    Args:
        result: SolveResult
        instance: The solved Instance
        verbose_trace: Also print the reduction trace table
    """
    from ..bounds_oracle import gamma, threshold_q

    G = instance.graph
    print_subsection("Solve result")
    print_metric("Decision", "YES" if result.decision else "NO")
    print_metric("Certificate", result.certificate)
    print_metric("n / m / k", f"{G.n} / {G.m} / {instance.k}")
    print_metric("gamma", format_quarter(gamma(G).q))
    print_metric("Threshold", format_quarter(threshold_q(G, instance.k)))
    print_metric("Witness forward arcs", result.witness.forward_arcs)
    print_metric("Witness", format_ordering(result.witness.order))
    if result.exact:
        print_metric("a(G)", result.a_restricted)
    print_metric("|U|", len(result.U))
    if verbose_trace and result.trace.steps:
        print(trace_table(result.trace.steps, instance.k).to_string(index=False))
