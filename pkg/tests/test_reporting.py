from src.bounds_oracle import Instance
from src.dp_solver import solve
from src.generators import gen_Ht
from src.graph_core import build
from src.reduction_engine import decompose
from src.utils.reporting import format_ordering, format_quarter, print_solve_summary, summary_table, trace_table


def test_format_quarter():
    assert format_quarter(26) == "6.50"
    assert format_quarter(8) == "2.00"


def test_format_ordering_truncates():
    assert format_ordering((2, 0, 1)) == "2 0 1"
    assert format_ordering(tuple(range(30)), limit=3) == "0 1 2 ... (30 total)"


def test_trace_table_tracks_k():
    result = decompose(Instance(graph=build(3, [(0, 1), (1, 2)]), k=1))
    table = trace_table(result.trace.steps, 1)
    assert list(table['rule']) == ['R3_Degree', 'R3_Degree']
    assert list(table['k_after']) == [0, -1]


def test_empty_trace_table():
    assert trace_table([]).empty


def test_summary_table(capsys):
    table = summary_table([{'case': 'a', 'value': 1}, {'case': 'b', 'value': 2}], index='case')
    assert table.loc['b', 'value'] == 2
    assert "value" in capsys.readouterr().out


def test_print_solve_summary(capsys):
    instance = Instance(graph=gen_Ht(2), k=1)
    print_solve_summary(solve(instance), instance, verbose_trace=True)
    out = capsys.readouterr().out
    assert "Decision: NO" in out
    assert "a(G): 4" in out
    assert "R1_SmallClique" in out
