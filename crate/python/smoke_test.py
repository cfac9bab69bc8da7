"""Smoke test of the besovop extension module.

Run after `maturin develop -m crates/py/Cargo.toml`, or after
`cargo build -p besovop-py --features extension-module`: in the second case
the built library is picked up from target/.
"""

import math
import os
import shutil
import sys
import tempfile


def import_besovop():
    try:
        import besovop
        return besovop
    except ImportError:
        pass
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    for profile in ("release", "debug"):
        lib = os.path.join(root, "target", profile, "libbesovop.so")
        if os.path.exists(lib):
            where = tempfile.mkdtemp()
            shutil.copy(lib, os.path.join(where, "besovop.so"))
            sys.path.insert(0, where)
            import besovop
            return besovop
    sys.exit("besovop is not installed and no built library was found under target/")


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    bo = import_besovop()

    f = bo.Filter("daubechies:4")
    assert f.order == 4 and len(f.lowpass) == 8
    assert max(f.residuals()) < 1e-12

    x = [math.sin(0.3 * i) + 0.1 * i for i in range(64)]
    scaling, details = bo.forward_dwt(x, "daubechies:4")
    back = bo.inverse_dwt(scaling, details, "daubechies:4")
    assert max(abs(a - b) for a, b in zip(x, back)) < 1e-10
    energy = sum(v * v for v in scaling) + sum(v * v for d in details for v in d)
    assert close(energy, sum(v * v for v in x), 1e-10)

    k = bo.Kernel.family("separable_gaussian", 6)
    assert k.shape == (64, 64)
    sigma = bo.singular_values(k)
    assert all(a >= b for a, b in zip(sigma, sigma[1:]))
    assert close(math.sqrt(sum(s * s for s in sigma)), k.l2_norm(), 1e-10)
    assert bo.besov_seminorm(k, 1.0, 1.0) > 0.0

    rough = bo.Kernel.family("fractional_rough", 8, {"alpha": 1.0}, seed=1)
    assert -2.0 < bo.decay_exponent(rough) < -1.0

    planted = bo.Kernel.family("wavelet_synthetic", 7, {"alpha": 1.0, "p": 1.0, "max_level": 5}, seed=3)
    report = bo.nonlinear_equivalence(planted, 1.0)
    assert 0.1 <= report["ratio"] <= 10.0

    one = bo.Kernel.from_rows([[1.0] * 16 for _ in range(16)], label="one")
    schur = bo.schur_estimate(one, 1.0, "haar", samples=20, ascent_steps=10, restarts=2)
    assert schur["lower_bound"] >= 0.999 and schur["besov_rhs"] == 1.0 and schur["consistent"]

    assert close(bo.lorentz_quasinorm([1.0, 0.5, 0.25], 1.0, 1.0), 1.75, 1e-12)
    assert math.isfinite(bo.hardy_check([0.9 ** n for n in range(256)], 0.5, 2.0, 1.0, 1.0))

    labels = [c.label for c in bo.corpus(5)]
    assert labels == sorted(labels) and "constant" in labels

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "g.kernel")
        k.save(path)
        assert bo.Kernel.load(path).rows() == k.rows()

    try:
        bo.Filter("daubechies:11")
    except ValueError:
        pass
    else:
        raise AssertionError("order 11 accepted")

    print("besovop smoke test passed")


if __name__ == "__main__":
    main()
