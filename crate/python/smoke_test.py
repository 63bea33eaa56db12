"""Smoke test for the heavytail_py extension.

Uses an installed module when available, otherwise the library built by
`cargo build --release -p heavytail-py`.
"""

import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile


def load():
    try:
        import heavytail_py

        return heavytail_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        for name in ("libheavytail_py.so", "libheavytail_py.dylib"):
            lib = root / "target" / profile / name
            if lib.exists():
                tmp = pathlib.Path(tempfile.mkdtemp()) / "heavytail_py.so"
                shutil.copy(lib, tmp)
                spec = importlib.util.spec_from_file_location("heavytail_py", tmp)
                module = importlib.util.module_from_spec(spec)
                spec.loader.exec_module(module)
                return module
    sys.exit("heavytail_py not found; run `cargo build --release -p heavytail-py` first")


def close(a, b, rel=1e-9):
    return abs(a - b) <= rel * max(abs(a), abs(b))


def main():
    ht = load()

    c = ht.Density.cauchy(1.0)
    assert close(c.pdf(0.0), 1.0 / math.pi)
    assert close(c.cdf(1.0), 0.75)
    assert close(c.quantile(0.75), 1.0)
    assert ht.Density("family=invgamma beta=1 m=1").descriptor() == "family=invgamma beta=1 m=1"

    assert close(ht.chernoff_rho(1.0).value, 0.25)
    assert ht.chernoff_rho(2.5).branch == "high"
    assert close(float(ht.wirtinger_d(1.0, 1.0)), 2.0 / math.log(2.0))
    try:
        ht.chernoff_rho(0.4)
    except ValueError:
        pass
    else:
        raise AssertionError("beta <= 1/2 must be rejected")

    assert len(ht.catalog_ids()) == 15
    rows = ht.verify("CHERNOFF_CAUCHY", {"beta": 2.5})
    assert rows and all(r["verdict"] == "PASS" for r in rows)

    gap = ht.spectral_gap(ht.Density.cauchy(2.5), "1+x^2", 512)
    assert abs(gap - 3.0) < 0.01, gap

    run = ht.evolve("invgamma", alpha=1.25, beta=2.0, n_cells=256)
    assert run["rate"] >= 0.95 * run["rate_bound"], run["rate"]
    assert all(b <= a + 1e-10 for a, b in zip(run["entropy"], run["entropy"][1:]))

    print("smoke test passed")


if __name__ == "__main__":
    main()
