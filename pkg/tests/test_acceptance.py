"""The eleven acceptance criteria, one test each.

Each test prints a single ``criterion NN PASS|FAIL`` line to the terminal.
Criterion 6 needs the conjugation bimodule's action table, which this
package does not have, so it fails.
"""

import pytest

from peculiar.selftest import CRITERIA, run


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"c{c[0]:02d}-{c[1]}" for c in CRITERIA])
def test_criterion(number, capsys):
    res = run(number)
    with capsys.disabled():
        print("\n" + res.line() + f"  ({res.seconds:.1f}s)")
    assert res.ok, res.detail
