#!/usr/bin/env python3
"""Smoke test for the wcl_py extension module.

Builds are produced by `cargo build --release -p wcl-py`; this script
copies the resulting cdylib next to itself under the importable name and
exercises the bindings against known closed-form values.
"""

import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_cdylib():
    candidates = [
        ROOT / "target" / "release" / "libwcl_py.so",
        ROOT / "target" / "debug" / "libwcl_py.so",
        ROOT / "target" / "release" / "libwcl_py.dylib",
        ROOT / "target" / "debug" / "libwcl_py.dylib",
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit(
        "wcl_py cdylib not found; run `cargo build --release -p wcl-py` first"
    )


def import_module():
    lib = locate_cdylib()
    stage = pathlib.Path(tempfile.mkdtemp(prefix="wcl-py-"))
    suffix = ".so" if lib.suffix == ".so" else ".so"  # importable name
    shutil.copy2(lib, stage / f"wcl_py{suffix}")
    sys.path.insert(0, str(stage))
    import wcl_py

    return wcl_py


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    wcl = import_module()

    # Front and lift at the worked example (u, x2, t) = (1, 1, 3).
    z, x1, x2 = wcl.front_family(1.0, 1.0, 3.0)
    approx(z, 43.0 / 15.0, 1e-13)
    approx(x1, -5.0)
    approx(x2, 1.0)

    xs, ys, z = wcl.lift_family(1.0, 1.0, 3.0)
    approx(xs[0], -5.0)
    approx(ys[0], -1.0 / 3.0)
    approx(ys[1], -14.0 / 3.0, 1e-13)
    approx(z, 43.0 / 15.0, 1e-13)

    # α(X_t) three ways: closed form, pairing, outer formula.
    approx(wcl.alpha_xt(1.0, 1.0, 3.0), 7.0 / 3.0, 1e-13)
    dx, dy, dz = wcl.isotopy_field(1.0, 1.0, 3.0)
    approx(wcl.alpha(xs, ys, z, dx, dy, dz), 7.0 / 3.0, 1e-12)
    approx(-ys[1] / (2.0 * xs[1]), 7.0 / 3.0, 1e-13)

    # u-inversions.
    approx(wcl.u_from_y1(ys[0], 1.0, 3.0, True), 1.0, 1e-10)
    approx(wcl.u_from_y2(xs[0], 1.0, ys[1], 3.0), 1.0, 1e-12)

    # Singular locus birth: empty before t = 0, two points after.
    assert wcl.singular_locus(-1.0) == []
    locus = wcl.singular_locus(1.0)
    assert len(locus) == 2
    approx(locus[0][1], -1.0, 1e-9)
    approx(locus[1][1], 1.0, 1e-9)

    # Escape-time profile plateau and outer band.
    approx(wcl.g_eval(0.0, 1.0, 10.0), 10.0)
    approx(wcl.g_eval(2.5, 1.0, 10.0), 0.0)
    mid = wcl.g_eval(1.5, 1.0, 10.0)
    assert 0.0 < mid < 10.0

    # Static model relation: t = 1 − c with x2² = |v|² − c.
    v, c = 0.8, 0.3
    x2v = math.sqrt(v * v - c)
    fam = wcl.front_family(0.7, x2v, 1.0 - c)
    stat = wcl.front_static(0.7, [v])
    approx(fam[1], stat[1], 1e-12)
    approx(fam[0], stat[2], 1e-12)

    # Pipeline surface: figures and a tiny sweep through the Config class.
    cfg = wcl.Config()
    cfg.set("render_ts", "1.0")
    figs = cfg.render()
    names = [n for n, _ in figs]
    assert "front_t1.000_x1z.svg" in names
    assert all(svg.startswith("<?xml") for _, svg in figs)

    cfg2 = wcl.Config()
    cfg2.set("g_cap", "2.0")
    table = cfg2.sweep("g_cap", [2.0])
    assert "lambda=" in table and "escape=" in table

    try:
        cfg2.set("nonsense", "1")
    except ValueError:
        pass
    else:
        sys.exit("unknown config key should raise")

    print("wcl_py smoke test: PASS")


if __name__ == "__main__":
    main()
