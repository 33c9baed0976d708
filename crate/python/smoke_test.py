"""Smoke test for the rcalab Python extension.

Build the module first:

    cargo build -p rcalab-python --features extension-module --release

then run `python3 python/smoke_test.py`. An installed `rcalab` package is
used when present; otherwise the shared library is loaded from target/.
"""

import importlib.util
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import rcalab

        return rcalab
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "librcalab.so"
        if lib.exists():
            spec = importlib.util.spec_from_file_location("rcalab", lib)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("rcalab extension not found; build crates/python first")


IDENTITY = "ca v1\nalphabet 0 1\nmemory 0\nanticipation 0\n0 -> 0\n1 -> 1\n"
AND = "ca v1\nalphabet 0 1\nmemory 0\nanticipation 1\n1 1 -> 1\ndefault 0\n"
SHIFT = "ca v1\nalphabet 0 1\nmemory 1\nanticipation 1\n0 -> 0\n1 -> 1\n"


def main():
    rc = load()

    ident = rc.Automaton.from_text(IDENTITY)
    assert ident.alphabet == ["0", "1"]
    assert ident.is_injective() == ("yes", None)
    assert ident.is_surjective()[0] == "yes"
    assert rc.Automaton.from_text(ident.to_text()).to_text() == ident.to_text()

    verdict, cert = rc.Automaton.from_text(AND).is_injective()
    assert verdict == "no" and cert.startswith("collision"), cert

    shift = rc.Automaton.from_text(SHIFT)
    assert shift.step("0|1|0", 1) == "0|1|0@-1"
    assert shift.lyapunov("0|1|0", 3) == 3
    assert shift.max_lyapunov(4)[0] == 4
    assert shift.local(["1"]) == "1"

    m = rc.mult_automaton(3, 6)
    assert (m.memory, m.anticipation) == (0, 1)
    assert m.is_injective()[0] == "yes"
    assert m.local(["1", "2"]) == "4"  # (1 mod 2) * 3 + 2 // 2

    frac, value = rc.average_exponent(2, 3, 2)
    assert frac == "4/3" and abs(value - 4 / 3) < 1e-12
    _, big = rc.average_exponent(2, 3, 40)
    assert abs(big / 40 - math.log(2) / math.log(6)) <= 3 / 40
    assert rc.witness_diverges(2, 3, 12)

    one = "tiles v1\ncolors c\ntile t c c c c\n"
    assert rc.complete_tiles(one) == one
    assert rc.tiles_automaton(one).is_injective()[0] == "yes"

    inner = rc.Automaton.from_text("ca v1\nalphabet b\nmemory 0\nanticipation 0\nb -> b\n")
    slope, cls, positions = rc.speed_experiment(inner, ["b"], 40)
    assert cls == "fast" and abs(slope - 2) < 1e-9 and positions[10] == 20
    _, cls, _ = rc.speed_experiment(inner, [], 40, target="fullshift")
    assert cls == "slow"

    try:
        rc.Automaton.from_text("ca v1\nalphabet 0\n")
    except ValueError as e:
        assert "line" in str(e) or "missing" in str(e), e
    else:
        raise AssertionError("bad rule file accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
