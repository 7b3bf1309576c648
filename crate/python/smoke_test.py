"""Checks the extension against closed forms and the oracle.

Build first, e.g. `maturin develop -m crates/python/Cargo.toml`, then run
`python python/smoke_test.py`.
"""

import json
import math

import oscillquad_py as oq

EXP = json.dumps({"type": "exponential", "g": [0, 1], "omega": 100.0})
BESSEL = json.dumps({"type": "bessel", "gamma": 1, "a": 2.0, "omega": 100.0})


def close(a, b, tol):
    assert abs(a - b) < tol, (a, b)


def main():
    r = oq.quad(EXP, amplitude="one", nu=32)
    close(r["value"], 2 * math.sin(100.0) / 100.0, 1e-10)
    assert r["path"] == "scalar_s0" and not r["residual_flagged"]

    fast = oq.quad(EXP, nu=128)["value"]
    dense = oq.quad(EXP, nu=128, method="dense")["value"]
    close(fast, dense, 1e-10)
    close(fast, oq.oracle(EXP, points=400000), 1e-8)

    b = oq.quad(BESSEL, nu=128, s=1)
    assert b["path"] == "block_s"
    close(b["value"], oq.oracle(BESSEL, points=400000), 1e-7)

    for bad in (lambda: oq.quad(EXP, nu=7), lambda: oq.quad("{}"), lambda: oq.quad(EXP, method="x")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    print("python smoke test: PASS")


if __name__ == "__main__":
    main()
