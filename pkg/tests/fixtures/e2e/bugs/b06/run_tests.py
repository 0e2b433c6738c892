import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
skip = set(filter(None, os.environ.get("MENDKIT_SKIP_TESTS", "").split(",")))


def check(name, fn):
    if name in skip:
        return
    try:
        print(name, "pass" if fn() else "fail")
    except Exception:
        print(name, "error")


import program

def cycle_flaky():
    path = os.path.join(tempfile.gettempdir(), "mendkit-e2e-b06.counter")
    n = int(open(path).read()) if os.path.exists(path) else 0
    open(path, "w").write(str(n + 1))
    return n % 3 != 2

check("t_even", lambda: program.parity(2) is True)
check("t_odd", lambda: program.parity(3) is False)
check("t_cycle", cycle_flaky)
