"""
Terminal status output.
"""

import re

import console
from console import (
    SYMBOLS,
    print_banner,
    print_step_error,
    print_step_success,
    print_step_warning,
    print_sub_step,
    print_table,
)

ANSI = re.compile(r"\x1b\[[0-9;]*m")


def stderr_text(capsys) -> str:
    out, err = capsys.readouterr()
    assert out == ""
    return ANSI.sub("", err)


def test_everything_goes_to_stderr(capsys):
    print_banner("shear, n = 32")
    print_step_success("records written")
    print_step_error("dt below dt_min")
    print_step_warning("under-resolved")
    print_sub_step("samples", "5")
    err = stderr_text(capsys)
    assert "mixbound" in err and "shear, n = 32" in err
    assert f"{SYMBOLS['success']} records written" in err
    assert f"{SYMBOLS['error']} dt below dt_min" in err
    assert f"{SYMBOLS['warning']} under-resolved" in err
    assert "samples: 5" in err


def test_no_color_environment(monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    assert console._color_enabled() is False


def test_table_columns_line_up(capsys):
    print_table("checks", [["mixing_bmo", "0.12", "holds"], ["gradient_theta", "1.5", "holds"]])
    lines = stderr_text(capsys).splitlines()
    rows = [line for line in lines if "holds" in line]
    assert len(rows) == 2
    assert rows[0].index("holds") == rows[1].index("holds")
    assert len({len(line) for line in lines}) == 1


def test_empty_table_prints_nothing(capsys):
    print_table("empty", [])
    assert stderr_text(capsys) == ""
