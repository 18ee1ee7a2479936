from pathlib import Path
from typing import Any, Dict, List, Optional

from jinja2 import Environment, FileSystemLoader, TemplateNotFound, select_autoescape

from .exceptions import ReportError


TEMPLATE_DIR = Path(__file__).parent / "templates"
REPORT_TEMPLATE = "run_report.txt"


def _number(value, digits: int = 10) -> str:
    if value is None:
        return "-"
    if isinstance(value, complex):
        return f"{value.real:.{digits}g}{value.imag:+.{digits}g}i"
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) for v in value
    ):
        return f"{value[0]:.{digits}g}{value[1]:+.{digits}g}i"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


class TemplateEngine:
    """Renders plain-text run reports using Jinja2."""

    def __init__(self, template_dir: Optional[Path] = None):
        """Initialize template engine with template directory."""
        self.template_dir = Path(template_dir or TEMPLATE_DIR)

        if not self.template_dir.exists():
            raise ReportError(f"Template directory not found: {self.template_dir}")

        self.env = Environment(
            loader=FileSystemLoader(str(self.template_dir)),
            autoescape=select_autoescape(["html", "xml"]),
            keep_trailing_newline=True,
        )
        self.env.filters["number"] = _number

    def list_templates(self) -> List[str]:
        """List available template files."""
        return sorted(p.name for p in self.template_dir.glob("*.txt"))

    def render(self, template_name: str, *, manifest: Dict[str, Any]) -> str:
        """Render a report from a manifest dictionary.

        Args:
            template_name: Name of template file
            manifest: ``RunManifest.to_dict()`` output

        Returns:
            Rendered report text

        Raises:
            ReportError: If template not found or rendering fails
        """
        try:
            template = self.env.get_template(template_name)
        except TemplateNotFound:
            raise ReportError(f"Template not found: {template_name}")

        config = manifest.get("config", {})
        context = {
            "command": config.get("command", "?"),
            "version": manifest.get("version"),
            "status": manifest.get("status"),
            "diagnostic": manifest.get("diagnostic"),
            "constants": manifest.get("constants", {}),
            "eigenvalues": manifest.get("eigenvalues", []),
            "poles": manifest.get("poles", []),
            "windings": manifest.get("windings", {}),
            "checks": manifest.get("checks", []),
            "files": manifest.get("files", []),
            "config": config,
        }

        try:
            return template.render(**context)
        except Exception as e:
            raise ReportError(f"Failed to render template {template_name}: {e}")

    def validate_template(self, template_name: str) -> bool:
        """Validate that template exists and can be loaded."""
        try:
            self.env.get_template(template_name)
            return True
        except Exception:
            return False
