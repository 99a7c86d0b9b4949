"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one ``PASS``/``FAIL`` line; the lines are also collected
and repeated in the terminal summary under "acceptance criteria".
"""

import subprocess
import sys

import pytest

from shrinkerlab.acceptance import CRITERIA

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    c = CRITERIA[number]()
    line = c.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    for f in c.failures:
        print(f"    {f}")
    assert c.passed, "; ".join(c.failures)


def test_criterion_11_report_all_is_byte_identical(tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "shrinkerlab", "report-all", "--output-dir", str(out)],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append((out / "report-all.json").read_bytes())
    same = outputs[0] == outputs[1]
    line = f"[{'PASS' if same else 'FAIL'}] criterion 11: report-all twice gives byte-identical JSON"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert same
