"""Smoke test for the Python bindings.

Build first with `cargo build --release -p supnorm-py`, then run
`python3 python/smoke.py`.
"""

import importlib.util
import json
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libsupnorm_py.so"
        if lib.exists():
            break
    else:
        sys.exit("libsupnorm_py.so not found; run cargo build --release -p supnorm-py")
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "supnorm_py.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("supnorm_py", target)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    sp = load()

    assert abs(sp.bessel_k_scaled(0.0, 1.0) - 0.4210244382407083) < 1e-10
    assert abs(sp.bessel_k_scaled(10.0, 1.0) - sp.bessel_k_scaled_series(10.0, 1.0)) < 1e-10
    try:
        sp.bessel_k_scaled(61.0, 1.0)
        raise AssertionError("window not enforced")
    except ValueError:
        pass

    got = sp.orbit_fourier(10.0, 0.1, 0.0, 0.0)
    assert abs(got - math.cos(2.0) / 0.2) < 1e-8

    m = sp.WeightModule(100.0)
    assert sum(1 for c in m.lift("sharp") if c != 0.0) == 21
    assert m.localisation_defect("sharp", "C") <= 2 * math.sqrt(100.0)

    pm = sp.PrincipalModel(3, 1)
    assert pm.num_cosets() == 12
    assert pm.new_vector_space_dim() == 1
    total, coeffs = pm.newform_coefficients()
    assert abs(total - 1.0) < 1e-9 and all(abs(c - math.sqrt(0.5)) < 1e-9 for c in coeffs)

    a = sp.amplifier_coefficients([11, 13], [1.0, 1.0], [1.0, -1.0])
    assert a[1] == 4.0 and a[143] == 2.0 and a[121 * 169] == -2.0
    inf, _ = sp.key_inequality_infimum(1e-3)
    assert abs(inf - 1.0) < 1e-12

    ledgers, final = sp.theorem_exponents()
    assert ledgers["naive"][0] == "T^1/12"
    assert final == (5, 24)
    assert "(Nλ)^5/24" in sp.exponent_table()

    assert sp.gtlv_invariants(1, 0, 0, 1, 3, 1) == (4, -6, 8)
    assert sp.gtlv_invariants(1, 0, 1, 1, 3, 1) == (2, -2, 4)

    ok, text = sp.run_suite("amplify")
    report = json.loads(text)
    assert ok and report["schema"] == 1 and all(c["status"] == "pass" for c in report["checks"])

    print("python smoke: ok")


if __name__ == "__main__":
    main()
