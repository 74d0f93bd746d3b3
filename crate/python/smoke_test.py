"""Smoke test for the fibtower Python extension.

Builds the extension with cargo (unless FIBTOWER_SKIP_BUILD is set), puts it
on the import path and exercises every exported function.
"""

import json
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_extension() -> Path:
    if not os.environ.get("FIBTOWER_SKIP_BUILD"):
        subprocess.run(
            ["cargo", "build", "--release", "-p", "fibtower-py", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
    target = Path(os.environ.get("CARGO_TARGET_DIR", ROOT / "target")) / "release"
    for name in ("libfibtower.so", "libfibtower.dylib", "fibtower.dll"):
        if (target / name).exists():
            return target / name
    sys.exit(f"extension library not found in {target}")


def main() -> None:
    built = build_extension()
    staging = Path(tempfile.mkdtemp(prefix="fibtower-"))
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy(built, staging / f"fibtower{suffix}")
    sys.path.insert(0, str(staging))

    import fibtower

    assert fibtower.fib(0) == 0
    assert fibtower.fib(100) == 354224848179261915075
    assert fibtower.fib_mod(91, 4) == 1
    assert fibtower.fib_mod(10**30, 10**9 + 7) == fibtower.fib_mod(10**30 % 2000000016, 10**9 + 7)
    assert fibtower.pisano_period(4) == 6
    assert fibtower.pisano_period(10, method="brute") == 60
    assert fibtower.factorize(832040) == [(2, 3), (5, 1), (11, 1), (31, 1), (61, 1)]

    a = fibtower.analyze(2, 5, 1)
    assert (a.unit_residue, a.case, a.exact, a.matches) == (1, "UNIT_ONE", True, True)
    assert json.loads(a.to_json())["unit_residue"] == "1"
    assert fibtower.analyze(3, 4, 1).unit_residue == 2
    assert fibtower.analyze(3, 3, 1).exact is False
    assert fibtower.predicted_residue(3, 9, 1) == ("SIGNED_HALF_POW", 18)
    assert fibtower.predicted_residue(1, 7, 2) == ("OUT_OF_RANGE", None)

    exact = fibtower.oracle_eval(3, 4, 1)
    assert exact.top_index == 576 and exact.valuation == 3 and exact.quotient_residue == 2
    for modulus in (7, 8, 97, 3**4):
        assert fibtower.tower_residue(3, 4, 1, modulus) == exact.value % modulus

    report = json.loads(fibtower.sweep("2..=3", "3..=8", "1..=2", jobs=2, strict=True))
    assert report["summary"]["rows"] == "24" and report["summary"]["mismatch"] == "0"
    csv = fibtower.sweep("2", "5", "1", format="csv")
    assert csv.splitlines()[1] == "5,2,1,5,2,true,1,true,UNIT_ONE,1,true,ok"

    for call, err in (
        (lambda: fibtower.fib(60_000_000), fibtower.BudgetError),
        (lambda: fibtower.oracle_eval(3, 7, 1, max_index=1000), fibtower.BudgetError),
        (lambda: fibtower.analyze(0, 5, 1), ValueError),
        (lambda: fibtower.sweep("3..2", "5", "1"), ValueError),
    ):
        try:
            call()
        except err:
            pass
        else:
            raise AssertionError(f"expected {err.__name__}")

    print(f"fibtower {fibtower.__version__}: python smoke test passed")


if __name__ == "__main__":
    main()
