"""Named, seeded experiments that turn the model's distributional claims
into pass/fail reports.

Every replica draws from its own ``RngStream(seed, index)``, so results do
not depend on the order or the process in which replicas run.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import _kernels as K
from ..coloring import coalescence_run
from ..core import Configuration, Geometry, PointField, RngStream, sample_configuration, sample_point_field
from ..dynamics import evolve
from ..errors import InvalidParameters, PositionCollision, UnknownExperiment
from ..queueing import CoupledConfig, MulticlassConfig, departures_array, priority_labels
from .palm import ShockState, find_string, is_regeneration_string, shock_construct
from .report import ExperimentReport, Verdict
from .stats import correlation_z, exponential_ks, poisson_counts_chi2, two_sample

# index offset for the streams of secondary sample families within one run
_STRING_STREAMS = 1_000_000


@dataclass(frozen=True)
class Param:
    default: object
    help: str


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    params: dict[str, Param]
    run: Callable[[dict, int, int], ExperimentReport]
    check: Callable[[dict], None]


def _map(fn, tasks, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _gen(seed: int, index: int) -> np.random.Generator:
    return RngStream(seed, index).generator()


def _rate(passes, total) -> float:
    return float(passes) / float(total) if total else float("nan")


# --- sampling helpers ------------------------------------------------------


def _poisson_line(rate: float, length: float, gen) -> np.ndarray:
    k = int(gen.poisson(rate * length))
    return np.sort(gen.uniform(0.0, length, k))


def _stationary_draw(counts, n: float, gen) -> tuple[np.ndarray, np.ndarray]:
    """Multiclass invariant sample on a cycle: positions of the last line and
    their 0-based classes."""
    lines = [np.sort(gen.uniform(0.0, n, c)) for c in counts]
    return lines[-1], priority_labels(lines, True)


def _class2_gaps(pos: np.ndarray, labels: np.ndarray, n: float) -> np.ndarray:
    """Gap from every class-2 particle to the next particle of class 1 or 2
    (cyclically); higher classes are ignored."""
    keep = labels <= 1
    merged = pos[keep]
    idx = np.flatnonzero(labels[keep] == 1)
    nxt = idx + 1
    wrap = nxt == merged.size
    nxt[wrap] = 0
    gaps = merged[nxt] - merged[idx]
    gaps[wrap] += n
    return gaps


def _pooled_stationary_gaps(counts, n, samples, gen) -> np.ndarray:
    return np.concatenate([_class2_gaps(*_stationary_draw(counts, n, gen), n) for _ in range(samples)])


def _coupled_rows(pairs) -> tuple[np.ndarray, np.ndarray]:
    """Stack (eta^1, eta^2) pairs of fixed sizes into kernel rows."""
    n1, n2 = pairs[0][0].size, pairs[0][1].size
    rows = np.empty((len(pairs), n1 + n2))
    for i, (a, b) in enumerate(pairs):
        rows[i, :n1] = a
        rows[i, n1:] = b
    return rows, np.array([0, n1, n1 + n2], np.int64)


def _evolve_rows(rows, offsets, n: float, horizon: float, gen, chunk: int = 250) -> None:
    """Run every row under its own rate-1 point field on the cycle [0, n) up
    to `horizon`.  Only final states are needed, so the points are applied
    in generation order, which is a valid time order for iid points."""
    for lo in range(0, rows.shape[0], chunk):
        part = rows[lo : lo + chunk]
        k = gen.poisson(n * horizon, size=part.shape[0])
        xs_off = np.zeros(part.shape[0] + 1, np.int64)
        xs_off[1:] = np.cumsum(k)
        xs = gen.uniform(0.0, n, int(xs_off[-1]))
        j, status = K.apply_points_batch(part, offsets, xs, xs_off, True, K.MODE_COUPLED)
        if status != K.OK:
            raise PositionCollision(f"point hits an occupied position in replica {lo + j}")
        rows[lo : lo + chunk] = part


def _row_gaps(rows, offsets, n: float) -> np.ndarray:
    n1 = offsets[1]
    out = []
    for row in rows:
        eta1, eta2 = row[:n1], row[n1:]
        labels = (~np.isin(eta2, eta1)).astype(np.int64)
        out.append(_class2_gaps(eta2, labels, n))
    return np.concatenate(out)


# --- parameter handling ----------------------------------------------------


def _resolve(exp: Experiment, params: dict | None) -> dict:
    params = dict(params or {})
    unknown = sorted(set(params) - set(exp.params))
    if unknown:
        raise InvalidParameters(f"{exp.name}: unknown parameter(s) {', '.join(unknown)}")
    out = {}
    for key, spec in exp.params.items():
        v = params.get(key, spec.default)
        d = spec.default
        try:
            if isinstance(d, bool):
                v = bool(v)
            elif isinstance(d, int):
                fv = float(v)
                if fv != int(fv):
                    raise ValueError
                v = int(fv)
            elif isinstance(d, float):
                v = float(v)
            elif isinstance(d, tuple):
                if isinstance(v, str):
                    v = [s for s in v.split(",") if s.strip()]
                cast = type(d[0]) if d else float
                v = tuple(cast(x) if cast is not int else int(float(x)) for x in v)
            elif isinstance(d, str):
                v = str(v)
        except (TypeError, ValueError):
            raise InvalidParameters(f"{exp.name}: bad value {v!r} for {key}") from None
        out[key] = v
    exp.check(out)
    return out


def _positive(p: dict, *keys: str) -> None:
    for k in keys:
        if not p[k] > 0:
            raise InvalidParameters(f"{k} must be positive, got {p[k]}")


def _fraction(p: dict, *keys: str) -> None:
    for k in keys:
        if not 0 < p[k] <= 1:
            raise InvalidParameters(f"{k} must lie in (0, 1], got {p[k]}")


def _increasing_counts(counts, what="counts") -> None:
    if len(counts) < 2 or any(c <= 0 for c in counts):
        raise InvalidParameters(f"{what} needs at least two positive entries")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise InvalidParameters(f"{what} must be strictly increasing, got {counts}")


_COMMON = {
    "alpha": Param(0.01, "significance level of every individual test"),
}


# --- burke -----------------------------------------------------------------


def _check_burke(p):
    _positive(p, "lam", "rho", "window", "replicas")
    _fraction(p, "alpha", "pass_fraction")
    if p["warmup"] < 0:
        raise InvalidParameters("warmup must be nonnegative")
    if not p["lam"] < p["rho"]:
        raise InvalidParameters(f"stability needs lam < rho, got lam={p['lam']}, rho={p['rho']}")


def _burke_replica(task):
    p, seed, r = task
    gen = _gen(seed, r)
    length = p["warmup"] + p["window"]
    a = _poisson_line(p["lam"], length, gen)
    s = _poisson_line(p["rho"], length, gen)
    d, _ = departures_array(a, s, False)
    gaps = np.diff(d[d >= p["warmup"]])
    return exponential_ks(gaps, p["lam"], name=f"replica-{r}:departure-gaps")


def _run_burke(p, seed, jobs):
    tests = _map(_burke_replica, [(p, seed, r) for r in range(p["replicas"])], jobs)
    passes = sum(t.p > p["alpha"] for t in tests)
    rate = _rate(passes, len(tests))
    return ExperimentReport(
        "burke",
        p,
        seed,
        tests,
        {"pass_rate": Verdict("departure gaps fit Exponential(lam)", rate, p["pass_fraction"])},
        {"passes": passes, "replicas": len(tests)},
    )


# --- invariance ------------------------------------------------------------


def _check_stationary(p):
    _increasing_counts(p["counts"])
    _positive(p, "cycle", "samples", "replicas")
    if p["time"] < 0:
        raise InvalidParameters("time must be nonnegative")


def _check_invariance(p):
    _check_stationary(p)
    _fraction(p, "alpha", "pass_fraction")


def _stationary_pairs(counts, n, samples, gen):
    pairs = []
    for _ in range(samples):
        pos, lab = _stationary_draw(counts, n, gen)
        pairs.append((pos[lab == 0], pos[lab <= 1]))
    return pairs


def _invariance_replica(task):
    p, seed, r = task
    gen = _gen(seed, r)
    counts, n = p["counts"], p["cycle"]
    fresh = _pooled_stationary_gaps(counts, n, p["samples"], gen)
    rows, off = _coupled_rows(_stationary_pairs(counts, n, p["samples"], gen))
    _evolve_rows(rows, off, n, p["time"], gen)
    evolved = _row_gaps(rows, off, n)
    return two_sample(fresh, evolved, name=f"replica-{r}:fresh-vs-evolved")


def _run_invariance(p, seed, jobs):
    tests = _map(_invariance_replica, [(p, seed, r) for r in range(p["replicas"])], jobs)
    passes = sum(t.p > p["alpha"] for t in tests)
    rate = _rate(passes, len(tests))
    return ExperimentReport(
        "invariance",
        p,
        seed,
        tests,
        {"pass_rate": Verdict("evolved stationary gaps match fresh draws", rate, p["pass_fraction"])},
        {"passes": passes, "replicas": len(tests)},
    )


# --- convergence -----------------------------------------------------------


def _check_convergence(p):
    _check_stationary(p)
    _fraction(p, "alpha", "pass_fraction", "reject_fraction")


def _uniform_pairs(counts, n, samples, gen):
    """Independent uniform classes with the class sizes of the stationary
    draw: eta^2 is uniform and eta^1 a uniform subset of it."""
    pairs = []
    for _ in range(samples):
        eta2 = np.sort(gen.uniform(0.0, n, counts[1]))
        pick = np.sort(gen.choice(eta2.size, counts[0], replace=False))
        pairs.append((eta2[pick], eta2))
    return pairs


def _convergence_replica(task):
    p, seed, r = task
    gen = _gen(seed, r)
    counts, n = p["counts"], p["cycle"]
    fresh = _pooled_stationary_gaps(counts, n, p["samples"], gen)
    rows, off = _coupled_rows(_uniform_pairs(counts, n, p["samples"], gen))
    start = _row_gaps(rows, off, n)
    _evolve_rows(rows, off, n, p["time"], gen)
    end = _row_gaps(rows, off, n)
    return (
        two_sample(fresh, start, name=f"replica-{r}:stationary-vs-initial"),
        two_sample(fresh, end, name=f"replica-{r}:stationary-vs-evolved"),
    )


def _run_convergence(p, seed, jobs):
    pairs = _map(_convergence_replica, [(p, seed, r) for r in range(p["replicas"])], jobs)
    tests = [t for pair in pairs for t in pair]
    rejects = sum(a.p < p["alpha"] for a, _ in pairs)
    passes = sum(b.p > p["alpha"] for _, b in pairs)
    return ExperimentReport(
        "convergence",
        p,
        seed,
        tests,
        {
            "initial_reject_rate": Verdict(
                "uniform initial law is distinguished from the stationary law",
                _rate(rejects, len(pairs)),
                p["reject_fraction"],
            ),
            "final_pass_rate": Verdict(
                "evolved law matches the stationary law", _rate(passes, len(pairs)), p["pass_fraction"]
            ),
        },
        {"initial_rejects": rejects, "final_passes": passes, "replicas": len(pairs)},
    )


# --- multiclass-burke ------------------------------------------------------


def _check_multiclass_burke(p):
    _increasing_counts(p["counts"])
    if len(p["counts"]) < 3:
        raise InvalidParameters("counts needs at least three lines")
    _positive(p, "cycle", "samples", "replicas")
    _fraction(p, "alpha", "pass_fraction")


def _multiclass_burke_replica(task):
    p, seed, r = task
    gen = _gen(seed, r)
    counts, n = p["counts"], p["cycle"]
    many = _pooled_stationary_gaps(counts, n, p["samples"], gen)
    two = _pooled_stationary_gaps(counts[:2], n, p["samples"], gen)
    return two_sample(many, two, name=f"replica-{r}:{len(counts)}-lines-vs-2-lines")


def _run_multiclass_burke(p, seed, jobs):
    tests = _map(_multiclass_burke_replica, [(p, seed, r) for r in range(p["replicas"])], jobs)
    passes = sum(t.p > p["alpha"] for t in tests)
    return ExperimentReport(
        "multiclass-burke",
        p,
        seed,
        tests,
        {
            "pass_rate": Verdict(
                "first two classes do not depend on the number of lines",
                _rate(passes, len(tests)),
                p["pass_fraction"],
            )
        },
        {"passes": passes, "replicas": len(tests)},
    )


# --- dual-points -----------------------------------------------------------


def _check_dual(p):
    _positive(p, "count", "cycle", "time", "grid", "replicas", "z_max")
    _fraction(p, "alpha", "pass_fraction")


def _dual_replica(task):
    p, seed, r = task
    gen = _gen(seed, r)
    n, t, m = p["cycle"], p["time"], p["grid"]
    g = Geometry.cycle(n)
    eta = sample_configuration(g, gen, count=p["count"])
    omega = sample_point_field(g, t, gen)
    traj = evolve(eta, omega, ())
    dual = traj.duals[0]
    boxes, _, _ = np.histogram2d(dual.xs, dual.ts, bins=[m, m], range=[[0.0, n], [0.0, t]])
    chi = poisson_counts_chi2(boxes, n * t / (m * m), name=f"replica-{r}:dual-box-counts")
    early = int(np.count_nonzero((dual.xs < n / 2) & (dual.ts <= t / 2)))
    final = traj.final.count_in(0.0, n / 2)
    return chi, early, final


def _run_dual(p, seed, jobs):
    out = _map(_dual_replica, [(p, seed, r) for r in range(p["replicas"])], jobs)
    tests = [o[0] for o in out]
    passes = sum(t.p > p["alpha"] for t in tests)
    corr = correlation_z([o[1] for o in out], [o[2] for o in out], name="dual-count-vs-final-count")
    tests.append(corr)
    return ExperimentReport(
        "dual-points",
        p,
        seed,
        tests,
        {
            "pass_rate": Verdict("dual points fit a rate-1 Poisson field", _rate(passes, len(out)), p["pass_fraction"]),
            "independence": Verdict(
                "dual points independent of the final state", abs(corr.statistic), p["z_max"], "<"
            ),
        },
        {"passes": passes, "replicas": len(out)},
    )


# --- regeneration ----------------------------------------------------------


def _check_regeneration(p):
    _increasing_counts(p["rates"], "rates")
    if len(p["rates"]) != 2:
        raise InvalidParameters("rates must give the two class-line rates")
    _increasing_counts(p["string_rates"], "string_rates")
    if not is_regeneration_string(p["string"], len(p["string_rates"])):
        raise InvalidParameters(f"{p['string']} is not a regeneration string for {len(p['string_rates'])} classes")
    _positive(p, "length", "span", "pick_width", "corr_window", "replicas", "z_max")
    _positive(p, "string_samples", "string_length", "string_window")
    _fraction(p, "alpha", "pass_fraction")
    if p["warmup"] < 0 or _regeneration_centre(p) + p["pick_width"] / 2 + p["span"] > p["length"]:
        raise InvalidParameters("warmup + 2 * span + pick_width must not exceed length")
    if p["string_warmup"] >= p["string_length"]:
        raise InvalidParameters("string_warmup must be shorter than string_length")


def _regeneration_centre(p) -> float:
    # the left test window of the leftmost admissible origin starts at warmup
    return p["warmup"] + p["span"] + p["pick_width"] / 2


def _regeneration_replica(task):
    p, seed, r = task
    gen = _gen(seed, r)
    length = p["length"]
    lines = [_poisson_line(rate, length, gen) for rate in p["rates"]]
    labels = priority_labels(lines, False)
    pos = lines[-1]
    centre = _regeneration_centre(p)
    cand = np.flatnonzero((labels == 1) & (np.abs(pos - centre) <= p["pick_width"] / 2))
    o = pos[cand[int(gen.integers(cand.size))]]
    c1 = pos[labels == 0]
    left = c1[(c1 < o) & (c1 >= o - p["span"])]
    right = pos[(pos > o) & (pos <= o + p["span"])]
    lt = exponential_ks(np.diff(np.append(left, o)), p["rates"][0], name=f"replica-{r}:left-class-1-gaps")
    rt = exponential_ks(np.diff(np.insert(right, 0, o)), p["rates"][1], name=f"replica-{r}:right-merged-gaps")
    a = p["corr_window"]
    n_left = int(np.count_nonzero((pos > o - a) & (pos < o)))
    n_right = int(np.count_nonzero((pos > o) & (pos < o + a)))
    return lt, rt, n_left, n_right


def _string_sample(task):
    """Counts within string_window left of the first occurrence of the
    string after warm-up, and right of its end."""
    p, seed, i = task
    gen = _gen(seed, _STRING_STREAMS + i)
    c = p["string"]
    a = p["string_window"]
    while True:
        lines = [_poisson_line(rate, p["string_length"], gen) for rate in p["string_rates"]]
        pos = lines[-1]
        classes = priority_labels(lines, False) + 1
        start = int(np.searchsorted(pos, p["string_warmup"] + a))
        j = find_string(classes, c, start)
        if j < 0:
            continue
        x0, xl = pos[j], pos[j + len(c) - 1]
        if xl + a >= p["string_length"]:
            continue
        n_left = int(np.count_nonzero((pos > x0 - a) & (pos < x0)))
        n_right = int(np.count_nonzero((pos > xl) & (pos < xl + a)))
        return n_left, n_right


def _run_regeneration(p, seed, jobs):
    out = _map(_regeneration_replica, [(p, seed, r) for r in range(p["replicas"])], jobs)
    strings = _map(_string_sample, [(p, seed, i) for i in range(p["string_samples"])], jobs)
    tests = [t for o in out for t in o[:2]]
    left_pass = sum(o[0].p > p["alpha"] for o in out)
    right_pass = sum(o[1].p > p["alpha"] for o in out)
    two = correlation_z([o[2] for o in out], [o[3] for o in out], name="two-class-left-vs-right-counts")
    many = correlation_z([s[0] for s in strings], [s[1] for s in strings], name="string-left-vs-right-counts")
    tests += [two, many]
    return ExperimentReport(
        "regeneration",
        p,
        seed,
        tests,
        {
            "left_pass_rate": Verdict(
                "class-1 gaps left of a class-2 particle fit Exponential(rate 1)",
                _rate(left_pass, len(out)),
                p["pass_fraction"],
            ),
            "right_pass_rate": Verdict(
                "merged gaps right of a class-2 particle fit Exponential(rate 2)",
                _rate(right_pass, len(out)),
                p["pass_fraction"],
            ),
            "two_class_independence": Verdict(
                "counts either side of a class-2 particle uncorrelated", abs(two.statistic), p["z_max"], "<"
            ),
            "string_independence": Verdict(
                "counts either side of a regeneration string uncorrelated", abs(many.statistic), p["z_max"], "<"
            ),
        },
        {"left_passes": left_pass, "right_passes": right_pass, "replicas": len(out), "string_samples": len(strings)},
    )


# --- coalescence -----------------------------------------------------------


def _check_coalescence(p):
    _positive(p, "count", "cycle", "horizon", "replicas")


def _coalescence_replica(task):
    p, seed, r = task
    run = coalescence_run(p["count"], p["cycle"], p["horizon"], _gen(seed, r))
    monotone = bool(np.all(np.diff(run.red) <= 0))
    return monotone, run.absorption_time


def _run_coalescence(p, seed, jobs):
    out = _map(_coalescence_replica, [(p, seed, r) for r in range(p["replicas"])], jobs)
    monotone = sum(m for m, _ in out)
    times = [t for _, t in out if t is not None]
    return ExperimentReport(
        "coalescence",
        p,
        seed,
        [],
        {
            "monotone_fraction": Verdict("red count never increases", _rate(monotone, len(out)), 1.0),
            "absorbed_fraction": Verdict("red count reaches zero before the horizon", _rate(len(times), len(out)), 1.0),
        },
        {
            "replicas": len(out),
            "absorbed": len(times),
            "median_absorption_time": float(np.median(times)) if times else None,
            "mean_absorption_time": float(np.mean(times)) if times else None,
        },
        {"absorption_time": times},
    )


# --- shock -----------------------------------------------------------------


def _check_shock(p):
    _positive(p, "lam", "rho", "time", "width", "replicas", "span_left", "span_right", "pick_width", "tolerance")
    if not p["lam"] > p["rho"]:
        raise InvalidParameters(f"a shock needs lam > rho, got lam={p['lam']}, rho={p['rho']}")
    if p["warmup"] < 0:
        raise InvalidParameters("warmup must be nonnegative")


def _shock_replica(task):
    p, seed, r = task
    gen = _gen(seed, r)
    first = p["warmup"] + p["span_left"]
    length = first + p["pick_width"] + p["span_right"]
    g = Geometry.interval(length)
    # class 1 at the low density, classes 1 and 2 together at the high one
    lines = [_poisson_line(p["rho"], length, gen), _poisson_line(p["lam"], length, gen)]
    labels = priority_labels(lines, False)
    pos = lines[-1]
    cand = np.flatnonzero((labels == 1) & (pos >= first) & (pos < first + p["pick_width"]))
    o = float(pos[cand[int(gen.integers(cand.size))]])
    lo, hi = o - p["span_left"], o + p["span_right"]
    inside = (pos >= lo) & (pos < hi)
    xi = MulticlassConfig(
        [Configuration._trusted(g, pos[inside & (labels == 0)]), Configuration._trusted(g, pos[inside & (labels == 1)])]
    )
    k = int(gen.poisson((hi - lo) * p["time"]))
    ts = np.sort(gen.uniform(0.0, p["time"], k))
    xs = gen.uniform(lo, hi, k)
    omega = PointField(g, xs, ts)
    out = {}
    for reading in ("A", "B"):
        eta, eta_prime = shock_construct(xi, o, reading)
        final = evolve(CoupledConfig([eta, eta_prime]), omega, ()).final
        s = ShockState.from_coupled(final, p["width"])
        out[reading] = (s.left_density, s.right_density, s.position - o)
    return out


def _run_shock(p, seed, jobs):
    out = _map(_shock_replica, [(p, seed, r) for r in range(p["replicas"])], jobs)
    summary = {"replicas": len(out)}
    for reading in ("A", "B"):
        arr = np.array([o[reading] for o in out])
        summary[f"reading_{reading}"] = {
            "left_density": float(arr[:, 0].mean()),
            "right_density": float(arr[:, 1].mean()),
            "mean_displacement": float(arr[:, 2].mean()),
        }
    a = summary["reading_A"]
    return ExperimentReport(
        "shock",
        p,
        seed,
        [],
        {
            "left_density": Verdict(
                "relative error of the density left of the discrepancy",
                abs(a["left_density"] / p["lam"] - 1.0),
                p["tolerance"],
                "<=",
            ),
            "right_density": Verdict(
                "relative error of the density right of the discrepancy",
                abs(a["right_density"] / p["rho"] - 1.0),
                p["tolerance"],
                "<=",
            ),
        },
        summary,
        {"displacement_A": [o["A"][2] for o in out]},
    )


# --- registry --------------------------------------------------------------


EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment(
            "burke",
            "Departures of a queue on an interval are Poisson at the arrival rate.",
            {
                "lam": Param(0.5, "arrival rate"),
                "rho": Param(1.0, "service rate, must exceed lam"),
                "window": Param(100000.0, "length measured after warm-up"),
                "warmup": Param(20000.0, "length discarded at the left edge"),
                "replicas": Param(100, "independent replicas"),
                "pass_fraction": Param(0.95, "required fraction of replicas with p > alpha"),
                **_COMMON,
            },
            _run_burke,
            _check_burke,
        ),
        Experiment(
            "invariance",
            "The multiclass stationary law on a cycle is preserved by the dynamics.",
            {
                "counts": Param((30, 60), "particles per line of the stationary draw"),
                "cycle": Param(100.0, "cycle length"),
                "time": Param(20.0, "evolution time"),
                "samples": Param(2000, "draws per sample"),
                "replicas": Param(100, "meta-replicas"),
                "pass_fraction": Param(0.95, "required fraction with p > alpha"),
                **_COMMON,
            },
            _run_invariance,
            _check_invariance,
        ),
        Experiment(
            "convergence",
            "Independent uniform classes converge to the stationary law.",
            {
                "counts": Param((30, 60), "class-1 and merged particle counts"),
                "cycle": Param(100.0, "cycle length"),
                "time": Param(50.0, "evolution time"),
                "samples": Param(2000, "draws per sample"),
                "replicas": Param(100, "meta-replicas"),
                "reject_fraction": Param(0.95, "required fraction rejected at time 0"),
                "pass_fraction": Param(0.90, "required fraction accepted at the final time"),
                **_COMMON,
            },
            _run_convergence,
            _check_convergence,
        ),
        Experiment(
            "multiclass-burke",
            "The first two classes of the stationary law do not depend on the number of lines.",
            {
                "counts": Param((20, 40, 60), "particles per line; compared with its first two entries"),
                "cycle": Param(100.0, "cycle length"),
                "samples": Param(2000, "draws per sample"),
                "replicas": Param(100, "meta-replicas"),
                "pass_fraction": Param(0.95, "required fraction with p > alpha"),
                **_COMMON,
            },
            _run_multiclass_burke,
            _check_multiclass_burke,
        ),
        Experiment(
            "dual-points",
            "Pre-jump positions of a stationary run form a rate-1 Poisson field.",
            {
                "count": Param(50, "particles on the cycle"),
                "cycle": Param(100.0, "cycle length"),
                "time": Param(50.0, "horizon"),
                "grid": Param(10, "boxes per axis"),
                "replicas": Param(100, "independent replicas"),
                "pass_fraction": Param(0.95, "required fraction with p > alpha"),
                "z_max": Param(3.0, "bound on the correlation z-score"),
                **_COMMON,
            },
            _run_dual,
            _check_dual,
        ),
        Experiment(
            "regeneration",
            "Left and right of a class-2 particle, or of a regeneration string, are independent.",
            {
                "rates": Param((0.5, 1.0), "class-1 rate and merged rate"),
                "length": Param(3000.0, "interval length"),
                "warmup": Param(1000.0, "length discarded at the left edge"),
                "pick_width": Param(200.0, "width of the central window the origin is drawn from"),
                "span": Param(800.0, "length tested on each side of the origin"),
                "corr_window": Param(100.0, "count window on each side for the correlation"),
                "replicas": Param(100, "independent replicas"),
                "string": Param((4, 1, 2, 3, 1, 2), "class pattern"),
                "string_rates": Param((0.25, 0.5, 0.75, 1.0), "line rates for the pattern test"),
                "string_samples": Param(400, "independent pattern occurrences"),
                "string_length": Param(20000.0, "interval length per pattern search"),
                "string_warmup": Param(1000.0, "length skipped before searching"),
                "string_window": Param(10.0, "count window on each side of the pattern"),
                "pass_fraction": Param(0.95, "required fraction with p > alpha"),
                "z_max": Param(3.0, "bound on the correlation z-score"),
                **_COMMON,
            },
            _run_regeneration,
            _check_regeneration,
        ),
        Experiment(
            "coalescence",
            "Two independent uniform configurations coalesce under common points.",
            {
                "count": Param(50, "particles per configuration"),
                "cycle": Param(100.0, "cycle length"),
                "horizon": Param(10000.0, "maximum run time"),
                "replicas": Param(200, "independent runs"),
            },
            _run_coalescence,
            _check_coalescence,
        ),
        Experiment(
            "shock",
            "A single discrepancy separates a high-density region from a low-density one.",
            {
                "lam": Param(1.0, "density left of the discrepancy"),
                "rho": Param(0.5, "density right of the discrepancy, below lam"),
                "time": Param(20.0, "evolution time"),
                "width": Param(30.0, "density window on each side"),
                "replicas": Param(200, "independent replicas"),
                "warmup": Param(500.0, "length discarded at the left edge"),
                "span_left": Param(200.0, "window kept left of the origin"),
                "span_right": Param(300.0, "window kept right of the origin"),
                "pick_width": Param(100.0, "width of the window the origin is drawn from"),
                "tolerance": Param(0.1, "allowed relative density error"),
            },
            _run_shock,
            _check_shock,
        ),
    ]
}


def resolve_params(name: str, params: dict | None = None) -> dict:
    if name not in EXPERIMENTS:
        raise UnknownExperiment(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    return _resolve(EXPERIMENTS[name], params)


def run_experiment(name: str, params: dict | None = None, seed: int = 0, *, jobs: int = 1) -> ExperimentReport:
    """Run a named experiment; the report depends only on (name, params, seed)."""
    p = resolve_params(name, params)
    t0 = time.perf_counter()
    report = EXPERIMENTS[name].run(p, int(seed), int(jobs))
    report.runtime_s = time.perf_counter() - t0
    return report
