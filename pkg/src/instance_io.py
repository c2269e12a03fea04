"""
Instance and Report Files

Instance file: a header line `n m k` followed by m lines `u v` (arc u -> v,
0-indexed). `#` starts a comment; blank lines are ignored.

Report file: line-oriented `key value` pairs plus `trace_begin` /
`trace_end` and `kernel_begin` / `kernel_end` blocks, as documented in
docs/report_format.md.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

from .errors import GraphError, InstanceParseError
from .graph_core import OrientedGraph, build

PathLike = Union[str, Path]


def _content_lines(text: str) -> List[Tuple[int, str]]:
    """(line number, stripped content) for every non-blank, non-comment line."""
    lines = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].strip()
        if content:
            lines.append((line_no, content))
    return lines


def _ints(content: str, count: int, line_no: int) -> List[int]:
    parts = content.split()
    if len(parts) != count:
        raise InstanceParseError(f"expected {count} integers, got {content!r}", line_no)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise InstanceParseError(f"expected integers, got {content!r}", line_no) from None


def parse_instance(text: str) -> Tuple[OrientedGraph, int]:
    """
    Parse instance text.

    Returns:
        Tuple of (graph, k)

    Raises:
        InstanceParseError: On a malformed line, a wrong arc count, or an
                            arc rejected by graph validation
    """
    lines = _content_lines(text)
    if not lines:
        raise InstanceParseError("missing header `n m k`", 1)

    header_no, header = lines[0]
    n, m, k = _ints(header, 3, header_no)
    if n < 0 or m < 0:
        raise InstanceParseError(f"negative count in header {header!r}", header_no)
    body = lines[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else header_no)
        raise InstanceParseError(f"header announces {m} arcs, found {len(body)}", where)

    arcs = []
    for line_no, content in body:
        arcs.append(tuple(_ints(content, 2, line_no)))

    try:
        graph = build(n, arcs)
    except GraphError as exc:
        line_no = next(
            (ln for (ln, _), arc in zip(body, arcs) if arc == exc.arc),
            header_no,
        )
        raise InstanceParseError(str(exc), line_no) from exc
    except ValueError as exc:
        raise InstanceParseError(str(exc), header_no) from exc
    return graph, k


def load_instance(path: PathLike) -> Tuple[OrientedGraph, int]:
    return parse_instance(Path(path).read_text())


def format_instance(G: OrientedGraph, k: int) -> str:
    lines = [f"{G.n} {G.m} {k}"]
    lines.extend(f"{u} {v}" for u, v in G.arcs)
    return "\n".join(lines) + "\n"


def write_instance(path: PathLike, G: OrientedGraph, k: int) -> None:
    Path(path).write_text(format_instance(G, k))


@dataclass
class ResultReport:
    """
    Machine-readable result of a CLI command.

    Optional fields are omitted from the text form when None.
    """
    decision: Optional[str] = None
    certificate: Optional[str] = None
    n: Optional[int] = None
    m: Optional[int] = None
    k: Optional[int] = None
    gamma_q: Optional[int] = None
    threshold_q: Optional[int] = None
    a_value: Optional[int] = None
    witness_forward: Optional[int] = None
    witness: Optional[Tuple[int, ...]] = None
    final_k: Optional[int] = None
    reason: Optional[str] = None
    trace: List[str] = field(default_factory=list)
    kernel: Optional[Tuple[OrientedGraph, int]] = None
    kernel_labels: Optional[Tuple[int, ...]] = None
    kernel_vertex_bound: Optional[int] = None
    kernel_arc_bound: Optional[int] = None
    kernel_within: Optional[bool] = None
    time_ms: Optional[float] = None


_INT_FIELDS = (
    'n', 'm', 'k', 'gamma_q', 'threshold_q', 'a_value', 'witness_forward',
    'final_k', 'kernel_vertex_bound', 'kernel_arc_bound',
)
_SCALAR_ORDER = (
    'decision', 'certificate', 'reason', 'n', 'm', 'k', 'gamma_q', 'threshold_q',
    'a_value', 'witness_forward',
)


def format_report(report: ResultReport) -> str:
    lines = []
    for key in _SCALAR_ORDER:
        value = getattr(report, key)
        if value is not None:
            lines.append(f"{key} {value}")
    if report.witness is not None:
        lines.append("witness " + " ".join(str(v) for v in report.witness))
    if report.final_k is not None:
        lines.append(f"final_k {report.final_k}")

    if report.trace:
        lines.append("trace_begin")
        lines.extend(report.trace)
        lines.append("trace_end")

    if report.kernel is not None:
        graph, k = report.kernel
        lines.append("kernel_begin")
        lines.extend(format_instance(graph, k).splitlines())
        lines.append("kernel_end")
        if report.kernel_labels is not None:
            lines.append("kernel_labels " + " ".join(str(v) for v in report.kernel_labels))
    for key in ('kernel_vertex_bound', 'kernel_arc_bound'):
        value = getattr(report, key)
        if value is not None:
            lines.append(f"{key} {value}")
    if report.kernel_within is not None:
        lines.append(f"kernel_within {'true' if report.kernel_within else 'false'}")

    if report.time_ms is not None:
        lines.append(f"time_ms {report.time_ms:.1f}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> ResultReport:
    """
    Parse report text written by format_report().

    Raises:
        InstanceParseError: On unknown keys, bad values or unterminated blocks
    """
    report = ResultReport()
    block: Optional[str] = None
    kernel_lines: List[str] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        content = raw.strip()
        if not content:
            continue

        if block == 'trace':
            if content == 'trace_end':
                block = None
            else:
                report.trace.append(content)
            continue
        if block == 'kernel':
            if content == 'kernel_end':
                block = None
                report.kernel = parse_instance("\n".join(kernel_lines))
            else:
                kernel_lines.append(content)
            continue

        if content == 'trace_begin':
            block = 'trace'
            continue
        if content == 'kernel_begin':
            block = 'kernel'
            continue

        key, _, value = content.partition(' ')
        value = value.strip()
        try:
            if key in _INT_FIELDS:
                setattr(report, key, int(value))
            elif key in ('decision', 'certificate', 'reason'):
                setattr(report, key, value)
            elif key == 'witness':
                report.witness = tuple(int(v) for v in value.split())
            elif key == 'kernel_labels':
                report.kernel_labels = tuple(int(v) for v in value.split())
            elif key == 'kernel_within':
                report.kernel_within = value == 'true'
            elif key == 'time_ms':
                report.time_ms = float(value)
            else:
                raise InstanceParseError(f"unknown report key {key!r}", line_no)
        except ValueError as exc:
            if isinstance(exc, InstanceParseError):
                raise
            raise InstanceParseError(f"bad value for {key}: {value!r}", line_no) from None

    if block is not None:
        raise InstanceParseError(f"unterminated {block} block", None)
    return report


def load_report(path: PathLike) -> ResultReport:
    return parse_report(Path(path).read_text())
