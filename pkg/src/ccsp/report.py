from typing import Optional

import pandas
import rich.console
import rich.table
from wasabi import msg

from .graph import EdgeLabeledGraph
from .polymorphism import ClassifierVerdict
from .solver import SolveTrace

console = rich.console.Console()


def frame_table(
    df: pandas.DataFrame, title: Optional[str] = None, index: bool = False
) -> rich.table.Table:
    table = rich.table.Table(title=title)
    if index:
        table.add_column(str(df.index.name or ""))
    for col in df.columns:
        numeric = pandas.api.types.is_numeric_dtype(df[col])
        table.add_column(str(col), justify="right" if numeric else "left")
    for key, row in df.iterrows():
        prefix = [str(key)] if index else []
        table.add_row(*prefix, *[_cell(v) for v in row.tolist()])
    return table


def _cell(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def graph_table(graph: EdgeLabeledGraph) -> rich.table.Table:
    table = rich.table.Table(title="Pair labels")
    table.add_column("pair")
    table.add_column("label")
    for (a, b), label in graph.pairs():
        shown = str(label)
        if (a, b) in graph.orientation:
            u, v = graph.orientation[(a, b)]
            shown = f"{shown} [{u}->{v}]"
        table.add_row(f"{{{a}, {b}}}", shown)
    return table


def print_verdict(verdict: ClassifierVerdict) -> None:
    if verdict.tractable:
        assert verdict.graph is not None
        msg.good("Language is tractable: every pair has a label")
        console.print(graph_table(verdict.graph))
    else:
        msg.fail(f"Language is NP-complete: pair {verdict.witness} has no tractable label")


def print_trace(trace: SolveTrace) -> None:
    msg.info(
        f"Recursion depth {trace.depth} (guideline {trace.guideline}), {trace.node_count} nodes"
    )
    counts = pandas.Series(trace.counts(), name="count").rename_axis("branch").sort_index()
    if not counts.empty:
        console.print(frame_table(counts.to_frame(), title="Branches", index=True))


def print_law_counts(counts: pandas.DataFrame) -> None:
    console.print(frame_table(counts, title="Law outcomes", index=True))
