"""Smoke test for the nodal_py extension.

Builds the extension with cargo if needed, loads it from a temporary
directory and exercises each binding once.

    python3 python/smoke_test.py [path/to/libnodal_py.so]
"""

import importlib.util
import json
import math
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_library() -> pathlib.Path:
    if len(sys.argv) > 1:
        return pathlib.Path(sys.argv[1])
    subprocess.run(
        ["cargo", "build", "--release", "-p", "nodal-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    for name in ("libnodal_py.so", "libnodal_py.dylib", "nodal_py.dll"):
        p = ROOT / "target" / "release" / name
        if p.exists():
            return p
    raise SystemExit("built library not found under target/release")


def load(lib: pathlib.Path, tmp: str):
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    dest = pathlib.Path(tmp) / ("nodal_py" + suffix)
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("nodal_py", dest)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def close(a, b, tol):
    return abs(a - b) < tol


def main() -> int:
    lib = locate_library()
    with tempfile.TemporaryDirectory() as tmp:
        m = load(lib, tmp)

        assert close(m.eisenstein(4, 10j), 1.0, 1e-12)
        assert close(m.eisenstein(2, 1j), 3 / math.pi, 1e-12)
        e1, e2, e3 = m.half_periods(1j)
        assert close(e2, 0.0, 1e-12) and close(e1 + e2 + e3, 0.0, 1e-12)
        assert close(m.wp(0.5, 1j), e1, 1e-12)
        # eta(i) = Gamma(1/4) / (2 pi^(3/4))
        assert close(m.dedekind_eta(1j), math.gamma(0.25) / (2 * math.pi ** 0.75), 1e-12)

        f = m.potential(-1, 1, 1j)
        assert close(f, -math.pi - 1 - 1 / (8 * math.pi), 1e-12)

        u = m.lyashko_looijenga(0.3 - 0.1j, 0.9 + 0.2j, 0.1 + 1.1j)
        s1, s2, tau = m.ll_inverse(*u)
        back = m.lyashko_looijenga(s1, s2, tau)
        assert max(abs(a - b) for a, b in zip(u, back)) < 1e-6

        assert m.braid("s1 s2 s1") == m.braid("s2 s1 s2")
        assert m.braid("") == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        roots = m.real_roots(2)
        assert [1, -1, 0] in roots and [1, 0, 0] not in roots

        report = json.loads(m.verify("lattice"))
        assert report["passed"], [c["name"] for c in report["checks"] if not c["passed"]]

        try:
            m.eisenstein(4, -1j)
        except ValueError:
            pass
        else:
            raise AssertionError("lower half-plane accepted")

    print("nodal_py smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
