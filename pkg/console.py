#!/usr/bin/env python3
"""
console.py - Terminal status output for the mixbound steps

Everything here writes to stderr so that stdout stays free for records.
"""

import os
import sys
from typing import Dict, List

# ═══════════════════════════════════════════════════════════════════════════════
# ANSI Color codes
# ═══════════════════════════════════════════════════════════════════════════════

class Colors:
    RESET = "\033[0m"
    BOLD = "\033[1m"
    DIM = "\033[2m"

    # Foreground colors
    RED = "\033[31m"
    GREEN = "\033[32m"
    YELLOW = "\033[33m"
    CYAN = "\033[36m"
    WHITE = "\033[37m"

    # Bright foreground
    BRIGHT_RED = "\033[91m"
    BRIGHT_GREEN = "\033[92m"
    BRIGHT_YELLOW = "\033[93m"
    BRIGHT_BLUE = "\033[94m"
    BRIGHT_MAGENTA = "\033[95m"
    BRIGHT_CYAN = "\033[96m"
    BRIGHT_WHITE = "\033[97m"


def _color_enabled() -> bool:
    if os.environ.get("NO_COLOR"):
        return False
    return hasattr(sys.stderr, "isatty") and sys.stderr.isatty()


if not _color_enabled():
    for _name in [n for n in vars(Colors) if n.isupper()]:
        setattr(Colors, _name, "")

# ═══════════════════════════════════════════════════════════════════════════════
# Unicode symbols
# ═══════════════════════════════════════════════════════════════════════════════

SYMBOLS: Dict[str, str] = {
    "success": "✓",
    "error": "✗",
    "warning": "⚠",
    "info": "ℹ",
    "arrow": "→",
    "gear": "⚙",
    "wave": "〰",
    "chart": "📊",
    "file": "📄",
    "sparkle": "✨",
}

# ═══════════════════════════════════════════════════════════════════════════════
# Print functions
# ═══════════════════════════════════════════════════════════════════════════════

def print_banner(subtitle: str = "") -> None:
    """Print the mixbound banner."""
    line = "═" * 62
    print(f"\n{Colors.BRIGHT_MAGENTA}╔{line}╗{Colors.RESET}", file=sys.stderr)
    print(f"{Colors.BRIGHT_MAGENTA}║{Colors.RESET} {Colors.BOLD}{Colors.BRIGHT_CYAN}"
          f"{'mixbound - 2d Euler mixing-rate bounds':<60}{Colors.RESET} {Colors.BRIGHT_MAGENTA}║{Colors.RESET}",
          file=sys.stderr)
    if subtitle:
        print(f"{Colors.BRIGHT_MAGENTA}║{Colors.RESET} {Colors.DIM}{subtitle[:60]:<60}{Colors.RESET} "
              f"{Colors.BRIGHT_MAGENTA}║{Colors.RESET}", file=sys.stderr)
    print(f"{Colors.BRIGHT_MAGENTA}╚{line}╝{Colors.RESET}", file=sys.stderr)


def print_step_header(step_num: int, total_steps: int, title: str) -> None:
    """Print a formatted step header."""
    progress = f"{Colors.DIM}[{step_num}/{total_steps}]{Colors.RESET}"
    icon = f"{Colors.BRIGHT_CYAN}●{Colors.RESET}"
    print(f"\n{Colors.BOLD}{Colors.BRIGHT_BLUE}━{Colors.RESET} {icon} {progress} {Colors.BOLD}{title}{Colors.RESET}",
          file=sys.stderr)


def print_step_success(message: str) -> None:
    print(f"  {Colors.BRIGHT_GREEN}{SYMBOLS['success']}{Colors.RESET} {Colors.GREEN}{message}{Colors.RESET}",
          file=sys.stderr)


def print_step_error(message: str) -> None:
    print(f"  {Colors.BRIGHT_RED}{SYMBOLS['error']}{Colors.RESET} {Colors.RED}{message}{Colors.RESET}",
          file=sys.stderr)


def print_step_info(message: str) -> None:
    print(f"  {Colors.BRIGHT_CYAN}{SYMBOLS['info']}{Colors.RESET} {Colors.CYAN}{message}{Colors.RESET}",
          file=sys.stderr)


def print_step_warning(message: str) -> None:
    print(f"  {Colors.BRIGHT_YELLOW}{SYMBOLS['warning']}{Colors.RESET} {Colors.YELLOW}{message}{Colors.RESET}",
          file=sys.stderr)


def print_sub_step(message: str, value: str = "") -> None:
    """Print a sub-step with formatted output."""
    if value:
        print(f"    {Colors.DIM}{SYMBOLS['arrow']}{Colors.RESET} {Colors.WHITE}{message}{Colors.RESET}: "
              f"{Colors.BRIGHT_WHITE}{value}{Colors.RESET}", file=sys.stderr)
    else:
        print(f"    {Colors.DIM}{SYMBOLS['arrow']}{Colors.RESET} {Colors.WHITE}{message}{Colors.RESET}",
              file=sys.stderr)


def print_table(title: str, rows: List[List[str]]) -> None:
    """Print rows as a boxed, left-aligned table."""
    if not rows:
        return
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    inner = sum(widths) + 3 * (len(widths) - 1)
    width = max(inner, len(title))
    print(f"  {Colors.BRIGHT_CYAN}┌{'─' * (width + 2)}┐{Colors.RESET}", file=sys.stderr)
    print(f"  {Colors.BRIGHT_CYAN}│{Colors.RESET} {Colors.BOLD}{title:<{width}}{Colors.RESET} "
          f"{Colors.BRIGHT_CYAN}│{Colors.RESET}", file=sys.stderr)
    print(f"  {Colors.BRIGHT_CYAN}├{'─' * (width + 2)}┤{Colors.RESET}", file=sys.stderr)
    for row in rows:
        cells = " │ ".join(f"{cell:<{w}}" for cell, w in zip(row, widths))
        print(f"  {Colors.BRIGHT_CYAN}│{Colors.RESET} {cells:<{width}} {Colors.BRIGHT_CYAN}│{Colors.RESET}",
              file=sys.stderr)
    print(f"  {Colors.BRIGHT_CYAN}└{'─' * (width + 2)}┘{Colors.RESET}", file=sys.stderr)
