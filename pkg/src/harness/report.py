"""
Console tables for batch summaries
"""
from typing import Dict, List, Tuple

from rich.table import Table


def summary_table(groups: List[Tuple[str, Dict[str, float]]], title: str = 'Results') -> Table:
    """SR/SPL per goal kind with the Overall row last"""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Task", style="cyan", no_wrap=True)
    table.add_column("Episodes", justify="right")
    table.add_column("SR (%)", justify="right", style="green")
    table.add_column("SPL (%)", justify="right", style="yellow")
    table.add_column("Excluded", justify="right", style="dim")

    for label, metrics in groups:
        style = "bold" if label == 'Overall' else None
        table.add_row(label, str(metrics['episodes']), f"{metrics['SR']:.1f}", f"{metrics['SPL']:.1f}",
                      str(metrics['excluded']), style=style)
    return table
