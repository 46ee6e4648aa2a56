"""Smoke test for the halflight_py extension module.

Build the module first:

    cargo build -p halflight-py

then run this script with any Python 3:

    python3 python/smoke_test.py

The script copies the built cdylib next to a temp directory under the
importable name and exercises the JSON API end to end.
"""

import json
import math
import pathlib
import shutil
import sys
import sysconfig
import tempfile

REPO = pathlib.Path(__file__).resolve().parent.parent


def locate_cdylib():
    candidates = []
    for profile in ("release", "debug"):
        base = REPO / "target" / profile
        candidates.extend(
            [base / "libhalflight_py.so", base / "libhalflight_py.dylib"]
        )
    for path in candidates:
        if path.exists():
            return path
    sys.exit(
        "halflight_py cdylib not found; run `cargo build -p halflight-py` first"
    )


def import_module():
    lib = locate_cdylib()
    tmp = tempfile.mkdtemp(prefix="halflight_py_")
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(lib, pathlib.Path(tmp) / f"halflight_py{suffix}")
    sys.path.insert(0, tmp)
    import halflight_py

    return halflight_py


def check(label, condition, detail=""):
    mark = "pass" if condition else "FAIL"
    print(f"  {mark}  {label}" + (f"  ({detail})" if detail else ""))
    return bool(condition)


def main():
    hl = import_module()
    ok = True

    names = hl.fixture_names()
    ok &= check("registry lists example fixtures", {"example1", "example2", "example3", "plane"} <= set(names), ", ".join(names))

    spec = hl.fixture_spec("example1")
    points = hl.fixture_points("example1")
    ok &= check("example1 has curated points", len(points) == 8)

    report = json.loads(hl.analyze(spec, points[:4]))
    cls = report["classification"]
    ok &= check("example1 residual suites pass", report["pass"], "; ".join(report["failures"][:2]))
    ok &= check(
        "example1 screen conformal factor is 1/2",
        abs(cls["phi"] - 0.5) < 1e-6 and cls["screen_homothetic"],
        f"phi = {cls['phi']:.9f}",
    )

    cls3 = json.loads(hl.classify_spec(hl.fixture_spec("example3"), hl.fixture_points("example3")))
    verdict = cls3["two_eigenvalue"]
    ok &= check(
        "example3 two-eigenvalue verdict",
        verdict == {"NotApplicable": {"reason": "not screen homothetic"}},
        json.dumps(verdict),
    )

    frame = json.loads(hl.frame_at(spec, points[0]))
    xi = frame["radical"]
    n_vec = frame["transversal"]
    pairing = -xi[0] * n_vec[0] + sum(a * b for a, b in zip(xi[1:], n_vec[1:]))
    ok &= check("frame pairing <xi, N> = 1", abs(pairing - 1.0) < 1e-10, f"{pairing:.12f}")
    xi_norm = -xi[0] * xi[0] + sum(a * a for a in xi[1:])
    ok &= check("radical is null", abs(xi_norm) < 1e-10, f"{xi_norm:.3e}")

    sampled = hl.sample_points(spec, 5, 42)
    ok &= check("seeded sampling is deterministic", sampled == hl.sample_points(spec, 5, 42))

    try:
        hl.fixture_spec("nope")
        ok &= check("unknown fixture raises", False)
    except ValueError:
        ok &= check("unknown fixture raises", True)

    try:
        hl.analyze('{"name": "broken"}', [[0.0]])
        ok &= check("malformed spec raises", False)
    except ValueError:
        ok &= check("malformed spec raises", True)

    tau_max = max(abs(t) for t in frame["tau"])
    ok &= check("example1 rotation 1-form vanishes", tau_max < 1e-10, f"max |tau| = {tau_max:.3e}")

    if not ok:
        sys.exit("smoke test FAILED")
    print("smoke test PASSED")


if __name__ == "__main__":
    main()
