"""End-to-end acceptance gate.

Six release criteria, one test each.  Every test prints a single
verdict line (PASS/FAIL plus the measured numbers) even under pytest's
capture, then asserts each sub-check at its stated tolerance.  The
bench and mesh criteria run full-size workloads, so this module
dominates the suite's wall time; each criterion also enforces its own
runtime ceiling.
"""

import math
import time

import numpy as np

from dirsim.antenna import (
    CardioidPattern,
    CircularPattern,
    DirectionalAntenna,
    FoliumPattern,
    OmniAntenna,
    RosePattern,
)
from dirsim.config import ConfigDocument
from dirsim.kernels import RadioArrays
from dirsim.neighbors import (
    NeighborsGraph,
    NeighborsGraphProcedure,
    coverage_set,
    make_procedure,
)
from dirsim.propagation import (
    RadioConfig,
    free_space_path_loss_db,
    is_in_coverage_area,
    link_budget_dbm,
    max_interference_distance_m,
    received_power_dbm,
)
from dirsim.scenarios.bench import run_bench
from dirsim.scenarios.mesh import run_mesh
from dirsim.scenarios.pattern_sweep import run_pattern_sweep
from dirsim.units import Position, bearing_deg, dbm_to_mw, distance_m, mw_to_dbm


def _verdict(capsys, name: str, checks: list[tuple[str, bool]], detail: str) -> None:
    ok = all(flag for _, flag in checks)
    bad = ", ".join(label for label, flag in checks if not flag)
    line = f"{name}: {'PASS' if ok else 'FAIL'}  {detail}"
    if bad:
        line += f"  [failed: {bad}]"
    with capsys.disabled():
        print(line)
    for label, flag in checks:
        assert flag, f"{name}: {label}"


def _omni(power_mw: float, threshold_dbm: float = -85.0) -> RadioConfig:
    return RadioConfig(
        transmitter_power_mw=power_mw,
        carrier_frequency_hz=2.4e9,
        antenna=OmniAntenna(),
        sensitivity_dbm=threshold_dbm,
        detection_threshold_dbm=threshold_dbm,
    )


# --- criterion 1: sweep rows reproduce the closed-form link budget ---


def test_criterion_1_pattern_sweep_reconstructs_gain_pattern(capsys):
    t0 = time.perf_counter()
    out = run_pattern_sweep(ConfigDocument())
    elapsed = time.perf_counter() - t0
    rows = out["rows"]
    antenna = DirectionalAntenna(
        family=FoliumPattern(1.0, 3.0),
        beam_width_deg=40.0,
        main_lobe_gain_db=15.0,
        side_lobe_gain_db=-5.0,
        orientation_deg=90.0,
    )
    ptx_dbm = mw_to_dbm(40.0)

    worst_prx = 0.0
    all_received = True
    by_ring: dict[float, dict[float, float]] = {}
    for angle, radius, prx, received in rows:
        expected = (
            ptx_dbm
            + antenna.gain_db(angle)
            - free_space_path_loss_db(radius, 2.4e9, 2.0)
            + 0.0
        )
        worst_prx = max(worst_prx, abs(prx - expected))
        all_received = all_received and received == 1
        by_ring.setdefault(radius, {})[angle] = prx

    radii = sorted(by_ring)
    inner = by_ring[radii[0]]
    angles = sorted(inner)
    peak_idx = max(range(len(angles)), key=lambda k: inner[angles[k]])
    peak_angle = angles[peak_idx]
    cut = inner[peak_angle] - 3.0

    def edge(direction: int) -> float:
        # Linear interpolation of the cut crossing; 20 dB of floor
        # separation keeps the walk far from the array ends.
        k = peak_idx
        while inner[angles[k + direction]] >= cut:
            k += direction
        a_in, a_out = angles[k], angles[k + direction]
        frac = (inner[a_in] - cut) / (inner[a_in] - inner[a_out])
        return a_in + (a_out - a_in) * frac

    width = edge(+1) - edge(-1)

    worst_ring = 0.0
    for r_near, r_far in zip(radii, radii[1:]):
        step = free_space_path_loss_db(r_far, 2.4e9, 2.0) - free_space_path_loss_db(
            r_near, 2.4e9, 2.0
        )
        for angle in angles:
            got = by_ring[r_near][angle] - by_ring[r_far][angle]
            worst_ring = max(worst_ring, abs(got - step))

    checks = [
        ("every row matches the closed form within 1e-9 dB", worst_prx <= 1e-9),
        ("every beacon was received on every ring", all_received),
        ("main lobe peaks at 90 +/- 1 deg", abs(peak_angle - 90.0) <= 1.0),
        ("3 dB width is 40 +/- 2 deg", abs(width - 40.0) <= 2.0),
        ("ring steps equal the path-loss difference within 1e-9 dB", worst_ring <= 1e-9),
        ("runtime under 10 s", elapsed < 10.0),
    ]
    _verdict(
        capsys,
        "criterion 1 (pattern reconstruction)",
        checks,
        f"rows={len(rows)} worst|dP|={worst_prx:.2e} dB peak={peak_angle:.1f} deg "
        f"width={width:.2f} deg worst ring step error={worst_ring:.2e} dB "
        f"{elapsed:.1f} s",
    )


# --- criterion 2: neighbor lists and update flags vs independent oracles ---


def _random_mixed_roster(rng: np.random.Generator, n: int, extent: float):
    roster = []
    for _ in range(n):
        if rng.random() < 0.5:
            cfg = _omni(float(10.0 ** rng.uniform(-1.0, 1.6)))
        else:
            det = float(rng.uniform(-92.0, -80.0))
            cfg = RadioConfig(
                transmitter_power_mw=float(10.0 ** rng.uniform(-1.0, 1.5)),
                carrier_frequency_hz=2.4e9,
                antenna=DirectionalAntenna(
                    family=FoliumPattern(1.0, 3.0),
                    beam_width_deg=float(rng.uniform(20.0, 90.0)),
                    main_lobe_gain_db=float(rng.uniform(6.0, 15.0)),
                    side_lobe_gain_db=float(rng.uniform(-10.0, -2.0)),
                    orientation_deg=float(rng.uniform(0.0, 360.0)),
                ),
                sensitivity_dbm=det + float(rng.uniform(0.0, 5.0)),
                detection_threshold_dbm=det,
            )
        pos = Position(float(rng.uniform(0.0, extent)), float(rng.uniform(0.0, extent)))
        roster.append((cfg, pos))
    arrays = RadioArrays.from_radios(roster)
    g_sys = max(cfg.antenna.max_gain_db for cfg, _ in roster)
    max_range = np.array([max_interference_distance_m(cfg, g_sys) for cfg, _ in roster])
    return roster, arrays, max_range


def _scalar_delivery_oracle(roster, arrays: RadioArrays, i: int) -> set[int]:
    # Brute force over every receiver with the scalar link budget, no
    # shared code with the kernels or the graph.
    tx_cfg = roster[i][0]
    tx_pos = Position(float(arrays.x[i]), float(arrays.y[i]))
    out = set()
    for j, (rx_cfg, _) in enumerate(roster):
        if j == i:
            continue
        rx_pos = Position(float(arrays.x[j]), float(arrays.y[j]))
        if distance_m(rx_pos, tx_pos) == 0.0:
            g_rx = rx_cfg.antenna.max_gain_db
        else:
            g_rx = rx_cfg.antenna.gain_db(bearing_deg(rx_pos, tx_pos))
        if received_power_dbm(tx_cfg, tx_pos, rx_pos, g_rx) >= tx_cfg.detection_threshold_dbm:
            out.add(j)
    return out


def test_criterion_2_neighbor_lists_match_brute_force_oracle(capsys):
    rng = np.random.default_rng(20260815)
    extent = 1500.0
    t0 = time.perf_counter()
    moves = consults = 0
    worst_n = 0
    for _ in range(25):
        n = int(rng.integers(2, 201))
        worst_n = max(worst_n, n)
        roster, arrays, max_range = _random_mixed_roster(rng, n, extent)
        graph = NeighborsGraph(arrays, max_range)
        graph.build()
        proc = NeighborsGraphProcedure(arrays, max_range)
        proc.build()
        for _ in range(48):
            i = int(rng.integers(n))
            if rng.random() < 0.55:
                prev_x = float(arrays.x[i])
                prev_y = float(arrays.y[i])
                step = max_range[i] / 4.0  # within the bounded-move guarantee
                x = float(np.clip(prev_x + rng.uniform(-step, step), 0.0, extent))
                y = float(np.clip(prev_y + rng.uniform(-step, step), 0.0, extent))
                arrays.set_position(i, x, y)
                graph.move_radio(i)
                proc.on_move(i)
                candidates, stale = graph.neighbors_and_updates(i)
                in_prev = (np.abs(prev_x - arrays.x) <= max_range) & (
                    np.abs(prev_y - arrays.y) <= max_range
                )
                in_cur = (np.abs(x - arrays.x) <= max_range) & (
                    np.abs(y - arrays.y) <= max_range
                )
                flipped = in_prev != in_cur
                flipped[i] = False
                assert stale == {int(j) for j in np.nonzero(flipped)[0]}
                in_box = (np.abs(arrays.x - x) <= max_range[i]) & (
                    np.abs(arrays.y - y) <= max_range[i]
                )
                assert candidates == {int(j) for j in np.nonzero(in_box)[0] if j != i}
                moves += 1
            else:
                assert proc.delivery_set(i) == _scalar_delivery_oracle(roster, arrays, i)
                consults += 1
        graph.validate()
    elapsed = time.perf_counter() - t0
    checks = [
        ("at least 1000 checked instances", moves + consults >= 1000),
        ("large rosters were exercised", worst_n >= 150),
        ("runtime under 60 s", elapsed < 60.0),
    ]
    _verdict(
        capsys,
        "criterion 2 (neighbor-list exactness)",
        checks,
        f"instances={moves + consults} (moves={moves} consults={consults}) "
        f"largest roster={worst_n} {elapsed:.1f} s",
    )


# --- criterion 3: one-way links exist; procedures agree when they can't ---


def test_criterion_3_asymmetric_link_and_procedure_agreement(capsys):
    loud = _omni(40.0)
    quiet = _omni(1.0)
    pos_a = Position(0.0, 0.0)
    pos_b = Position(500.0, 0.0)
    roster = [(loud, pos_a), (quiet, pos_b)]
    arrays = RadioArrays.from_radios(roster)
    witness = 1 in coverage_set(arrays, 0) and 0 not in coverage_set(arrays, 1)
    witness_scalar = is_in_coverage_area(loud, pos_a, pos_b, 0.0) and not is_in_coverage_area(
        quiet, pos_b, pos_a, 0.0
    )
    ranges = np.array([max_interference_distance_m(cfg, 0.0) for cfg, _ in roster])
    witness_procs = True
    for number in (2, 3):
        proc = make_procedure(number, RadioArrays.from_radios(roster), ranges.copy())
        proc.build()
        witness_procs = (
            witness_procs
            and proc.delivery_set(0) == {1}
            and proc.delivery_set(1) == set()
        )

    rng = np.random.default_rng(3301)
    n = 25
    base = [
        (_omni(1.0), Position(float(rng.uniform(0.0, 400.0)), float(rng.uniform(0.0, 400.0))))
        for _ in range(n)
    ]
    arrays_by_proc = [RadioArrays.from_radios(base) for _ in range(3)]
    d_max = max_interference_distance_m(_omni(1.0), 0.0)
    procs = [
        make_procedure(k + 1, arrays_by_proc[k], np.full(n, d_max)) for k in range(3)
    ]
    for proc in procs:
        proc.build()
    agreement = True
    agreed = 0
    for step in range(150):
        i = int(rng.integers(n))
        x = float(rng.uniform(0.0, 400.0))
        y = float(rng.uniform(0.0, 400.0))
        for arr, proc in zip(arrays_by_proc, procs):
            arr.set_position(i, x, y)
            proc.on_move(i)
        if step % 2 == 0:
            q = int(rng.integers(n))
            sets = [proc.delivery_set(q) for proc in procs]
            oracle = coverage_set(arrays_by_proc[0], q)
            agreement = agreement and sets[0] == sets[1] == sets[2] == oracle
            agreed += 1

    checks = [
        ("40 mW radio is listed by the 1 mW radio and not vice versa", witness),
        ("the same one-way link shows in the scalar predicate", witness_scalar),
        ("procedures 2 and 3 report the one-way link", witness_procs),
        ("procedures 1/2/3 agree on a homogeneous roster", agreement),
    ]
    _verdict(
        capsys,
        "criterion 3 (asymmetry witness)",
        checks,
        f"witness at 500 m with 40 mW vs 1 mW, {agreed} agreement consults",
    )


# --- criterion 4: maintenance cost ordering on the benchmark workload ---


def test_criterion_4_maintenance_cost_ordering(capsys):
    t0 = time.perf_counter()
    means = {}
    for number in (1, 2, 3):
        out = run_bench(ConfigDocument(), procedure=number, seed=0)
        times = [row[2] for row in out["rows"]]
        assert len(times) == 10
        means[number] = sum(times) / len(times)
    elapsed = time.perf_counter() - t0
    t1, t2, t3 = means[1], means[2], means[3]
    checks = [
        ("shared-range is cheapest and per-radio recompute dearest", t1 < t3 < t2),
        ("sweep overhead at most a third of recompute overhead", (t2 - t1) >= 3.0 * (t3 - t1)),
        ("runtime under 15 min", elapsed < 900.0),
    ]
    _verdict(
        capsys,
        "criterion 4 (maintenance cost ordering)",
        checks,
        f"mean neighbor wall ms: proc1={t1:.1f} proc3={t3:.1f} proc2={t2:.1f} "
        f"separation={(t2 - t1) / (t3 - t1):.1f}x {elapsed:.0f} s",
    )


# --- criterion 5: relay-chain loss, collision spread, throughput ratio ---


def test_criterion_5_relay_chain_properties(capsys):
    t0 = time.perf_counter()
    saturated = ConfigDocument()
    windowed = ConfigDocument()
    windowed.set("windowPackets", 4)
    windowed.set("reverseWindowPackets", 4)
    # Windowed streams are delivery-clocked: a dropped packet would
    # shrink the in-flight window for good, so the retry cap is raised.
    windowed.set("maxRetries", 100)

    losses = {"omni": [], "directional": []}
    tput = {"omni": [], "directional": []}
    relay_win = {"omni": [], "directional": []}
    for seed in range(30):
        for mode in ("omni", "directional"):
            out = run_mesh(saturated, mode, seed=seed)
            losses[mode].append(out["total_losses"])
            tput[mode].append(out["throughput_bps"])
            win = run_mesh(windowed, mode, seed=seed)
            relay_win[mode].append(win["relay_collisions"])

    single = {"omni": [], "directional": []}
    baseline = ConfigDocument()
    baseline.set("relays", 0)
    for seed in range(5):
        for mode in ("omni", "directional"):
            single[mode].append(run_mesh(baseline, mode, seed=seed)["throughput_bps"])
    elapsed = time.perf_counter() - t0

    mean_loss = {m: float(np.mean(losses[m])) for m in losses}
    omni_relays = np.mean(np.array(relay_win["omni"], dtype=float), axis=0)
    cv_omni = float(np.std(omni_relays) / np.mean(omni_relays))
    dir_relays = np.mean(np.array(relay_win["directional"], dtype=float), axis=0)
    spread_dir = float(np.max(dir_relays) / np.min(dir_relays))
    ratio = {
        m: float(np.mean(tput[m]) / np.mean(single[m])) for m in tput
    }

    checks = [
        (
            "directional loses fewer packets than omni at the same load",
            mean_loss["directional"] < mean_loss["omni"],
        ),
        ("omni collisions spread evenly over the chain (CV < 0.3)", cv_omni < 0.3),
        (
            "directional collisions vary with chain position (max/min > 1.5)",
            float(np.min(dir_relays)) > 0.0 and spread_dir > 1.5,
        ),
        (
            "ten-hop throughput under 0.6x the single-hop rate in both modes",
            all(0.0 < ratio[m] < 0.6 for m in ratio),
        ),
        ("runtime under 5 min", elapsed < 300.0),
    ]
    _verdict(
        capsys,
        "criterion 5 (relay-chain properties)",
        checks,
        f"mean losses omni={mean_loss['omni']:.1f} dir={mean_loss['directional']:.1f} "
        f"omni CV={cv_omni:.3f} dir spread={spread_dir:.2f} "
        f"tput ratio omni={ratio['omni']:.2f} dir={ratio['directional']:.2f} "
        f"{elapsed:.0f} s",
    )


# --- criterion 6: unit identities and run-to-run determinism ---


def test_criterion_6_numeric_identities_and_determinism(capsys):
    rng = np.random.default_rng(6001)

    worst_rt = 0.0
    for mw in np.logspace(-9.0, 6.0, 400):
        worst_rt = max(worst_rt, abs(dbm_to_mw(mw_to_dbm(mw)) - mw) / mw)

    doubling = 20.0 * math.log10(2.0)
    worst_double = 0.0
    for d in np.logspace(-0.5, 4.0, 200):
        for f in (9.0e8, 2.4e9, 5.9e9):
            got = free_space_path_loss_db(2.0 * d, f, 2.0) - free_space_path_loss_db(
                d, f, 2.0
            )
            worst_double = max(worst_double, abs(got - doubling))

    bitwise = True
    for _ in range(200):
        p = float(rng.uniform(-30.0, 30.0))
        pl = float(rng.uniform(20.0, 140.0))
        bitwise = bitwise and link_budget_dbm(p, 0.0, pl, 0.0) == p - pl

    worst_ant = 0.0
    for family in (
        CircularPattern(),
        CardioidPattern(),
        FoliumPattern(1.0, 3.0),
        RosePattern(2.0),
    ):
        for width in (20.0, 40.0, 120.0):
            antenna = DirectionalAntenna(
                family=family,
                beam_width_deg=width,
                main_lobe_gain_db=12.0,
                side_lobe_gain_db=-6.0,
                orientation_deg=90.0,
            )
            worst_ant = max(
                worst_ant,
                abs(antenna.gain_db(90.0) - 12.0),
                abs(antenna.gain_db(90.0 - width / 2.0) - 9.0),
                abs(antenna.gain_db(90.0 + width / 2.0) - 9.0),
                abs(antenna.gain_db(270.0) - (-6.0)),
            )

    doc = ConfigDocument()
    doc.set("relays", 2)
    doc.set("duration", 0.3)
    traces = []
    for _ in range(2):
        trace: list[str] = []
        run_mesh(doc, "omni", seed=11, trace=trace)
        traces.append("\n".join(trace).encode())
    other: list[str] = []
    run_mesh(doc, "omni", seed=12, trace=other)

    checks = [
        ("mW/dBm round trip within 1e-12 relative", worst_rt <= 1e-12),
        ("doubling distance adds 6.021 dB within 1e-9", worst_double <= 1e-9),
        ("zero-gain budget equals power minus loss bitwise", bitwise),
        ("boresight, 3 dB edges and floor within 1e-6 dB", worst_ant <= 1e-6),
        ("same seed gives byte-identical traces", traces[0] == traces[1]),
        ("different seed changes the trace", "\n".join(other).encode() != traces[0]),
    ]
    _verdict(
        capsys,
        "criterion 6 (numeric identities and determinism)",
        checks,
        f"round trip={worst_rt:.1e} doubling={worst_double:.1e} "
        f"antenna={worst_ant:.1e} trace bytes={len(traces[0])}",
    )
