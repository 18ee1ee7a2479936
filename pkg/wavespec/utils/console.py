from typing import Iterable, Optional, Sequence, Tuple

from rich.console import Console
from rich.table import Table


console = Console()


def print_success(message: str) -> None:
    """Print success message in green."""
    console.print(f"✅ {message}", style="green")


def print_error(message: str) -> None:
    """Print error message in red."""
    console.print(f"❌ {message}", style="red")


def print_warning(message: str) -> None:
    """Print warning message in yellow."""
    console.print(f"⚠️  {message}", style="yellow")


def print_info(message: str) -> None:
    """Print info message in blue."""
    console.print(f"ℹ️  {message}", style="blue")


def _fmt(value) -> str:
    if isinstance(value, complex):
        return f"{value.real:.10g}{value.imag:+.10g}i"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def display_wavespeeds(rows: Iterable[Tuple[float, float]], title: str = "Wavespeeds") -> None:
    """Display (eps, c) pairs; eps = 0 is the singular limit."""
    table = Table(title=title)
    table.add_column("eps", style="cyan")
    table.add_column("c", style="green")
    for eps, c in rows:
        table.add_row("0 (singular)" if eps == 0 else _fmt(eps), _fmt(c))
    console.print(table)


def display_spectrum_table(eigenvalues: Sequence[float], poles: Sequence[float],
                           windings: Optional[Sequence[Optional[int]]] = None) -> None:
    """Display slow eigenvalues and poles of the Evans function."""
    table = Table(title="Real slow spectrum")
    table.add_column("Kind", style="cyan")
    table.add_column("lambda", style="green")
    table.add_column("Winding (r=0.03)", style="yellow")
    for lam in eigenvalues:
        table.add_row("eigenvalue", _fmt(lam), "")
    windings = list(windings or [])
    for i, lam in enumerate(poles):
        wind = windings[i] if i < len(windings) and windings[i] is not None else "-"
        table.add_row("pole", _fmt(lam), str(wind))
    console.print(table)


def display_checks_table(results: Iterable[Tuple[str, bool, str]],
                         title: str = "Verification") -> None:
    """Pass/fail table of (name, passed, detail)."""
    table = Table(title=title)
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Detail", style="dim")
    for name, passed, detail in results:
        table.add_row(name, "[green]pass[/green]" if passed else "[red]FAIL[/red]", detail)
    console.print(table)


def display_distances(rows: Iterable[Tuple[float, float, float]]) -> None:
    table = Table(title="Distance to the reduced solution")
    table.add_column("eps", style="cyan")
    table.add_column("c", style="blue")
    table.add_column("sup distance", style="green")
    for eps, c, dist in rows:
        table.add_row(_fmt(eps), _fmt(c), f"{dist:.3e}")
    console.print(table)


def display_step(step_num: int, total_steps: int, description: str) -> None:
    """Display current step progress."""
    progress = f"[{step_num}/{total_steps}]"
    console.print(f"\n{progress} {description}", style="bold blue")


def print_divider() -> None:
    """Print a visual divider."""
    console.print("─" * 60, style="dim")
