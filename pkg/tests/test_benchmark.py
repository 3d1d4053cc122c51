import runpy
from pathlib import Path

BENCH = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"


def test_benchmark_runs(capsys):
    mod = runpy.run_path(str(BENCH))
    mod["main"](["--n", "8", "--steps", "2", "--repeats", "1"])
    out = capsys.readouterr().out
    assert "speedup" in out and out.strip().splitlines()[-1].split()[0] == "8"
