"""Compare the compiled and pure-numpy power kernels.

Times the three kernel entry points on random rosters of increasing
size and reports the worst absolute disagreement between backends.
Run as a script; pass roster sizes as arguments if the defaults are
too slow on the host.

    python benchmarks/kernel_benchmark.py [size ...]
"""

from __future__ import annotations

import sys
import time

import numpy as np

from dirsim import kernels
from dirsim.antenna import DirectionalAntenna, FoliumPattern, OmniAntenna
from dirsim.propagation import RadioConfig
from dirsim.units import Position


def random_roster(rng: np.random.Generator, n: int) -> kernels.RadioArrays:
    radios = []
    for i in range(n):
        if i % 2:
            antenna = DirectionalAntenna(
                family=FoliumPattern(a=1.0, b=3.0),
                beam_width_deg=float(rng.uniform(10.0, 80.0)),
                main_lobe_gain_db=float(rng.uniform(5.0, 20.0)),
                side_lobe_gain_db=-5.0,
                orientation_deg=float(rng.uniform(0.0, 360.0)),
            )
        else:
            antenna = OmniAntenna()
        config = RadioConfig(
            transmitter_power_mw=float(rng.uniform(0.1, 100.0)),
            carrier_frequency_hz=2.4e9,
            antenna=antenna,
        )
        pos = Position(float(rng.uniform(0.0, 2000.0)), float(rng.uniform(0.0, 2000.0)))
        radios.append((config, pos))
    return kernels.RadioArrays.from_radios(radios)


def time_call(fn, repeats: int = 20) -> float:
    fn()  # compile / warm caches outside the timed region
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def main(sizes: list[int]) -> None:
    backends = kernels.available_kernel_sets()
    print("backends:", ", ".join(ks.name for ks in backends))
    rng = np.random.default_rng(7)
    header = f"{'n':>6} {'kernel':<18}" + "".join(f"{ks.name:>12}" for ks in backends)
    print(header + f"{'max |diff|':>14}")
    for n in sizes:
        arrays = random_roster(rng, n)
        idx = np.arange(1, n, dtype=np.int64)
        calls = {
            "delivery_matrix": lambda ks: ks.delivery_matrix(arrays),
            "pair_power_row": lambda ks: ks.pair_power_row(arrays, 0),
            "pair_power_subset": lambda ks: ks.pair_power_subset(arrays, 0, idx),
        }
        for name, call in calls.items():
            times = [time_call(lambda ks=ks: call(ks)) for ks in backends]
            outs = [np.asarray(call(ks)) for ks in backends]
            finite = np.isfinite(outs[0])
            diff = 0.0
            for other in outs[1:]:
                diff = max(diff, float(np.max(np.abs(outs[0][finite] - other[finite]))))
            row = f"{n:>6} {name:<18}"
            row += "".join(f"{t * 1e6:>10.1f}us" for t in times)
            print(row + f"{diff:>14.3e}")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [50, 100, 200])
