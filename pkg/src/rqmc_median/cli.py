"""Experiment driver: histogram, convergence, variance, and acceptance modes.

Every run is keyed by one master seed.  Each (scrambler, integrand, m, r)
cell derives its per-repetition batch seeds from (master seed, cell index,
repetition), and every CSV row echoes its cell key and seed, so any row can
be regenerated in isolation.  Output uses fixed 17-significant-digit
formatting and is bit-identical across runs with the same configuration.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acceptance, stats
from .estimators import median_estimator, replicate_batch
from .integrands import builtin, builtin_names
from .scramble import LINEAR_KINDS, ScramblerKind, ScramblerSpec, _is_prime

__all__ = ["DEFAULT_SEED", "ExperimentConfig", "entry", "main"]

DEFAULT_SEED = 20250809
CSV_HEADER = "scrambler,integrand,base,m,N,r,rep,value,rescaled,kind,seed"

_MODES = ("histogram", "convergence", "variance", "acceptance")

_MODE_DEFAULTS = {
    "histogram": dict(scramblers=("nested", "matousek"), integrands=("f1", "f2"),
                      m_values=(4, 6), r_values=(1,), repetitions=10_000),
    "convergence": dict(scramblers=("nested", "matousek"), integrands=("f1", "f2"),
                        m_values=tuple(range(4, 13)), r_values=(101,), repetitions=32),
    "variance": dict(scramblers=("nested", "jittered", "matousek", "tezuka", "striped"),
                     integrands=("f1", "f2", "linear"), m_values=(6,), r_values=(1,),
                     repetitions=10_000),
    "acceptance": dict(scramblers=(), integrands=(), m_values=(), r_values=(),
                       repetitions=0),
}


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    mode: str
    scramblers: tuple[str, ...] = ()
    integrands: tuple[str, ...] = ()
    base: int = 2
    m_values: tuple[int, ...] = ()
    r_values: tuple[int, ...] = ()
    repetitions: int = 0
    master_seed: int = DEFAULT_SEED
    out_dir: Path = Path("results")
    shift: bool = True
    criteria: tuple[int, ...] = tuple(range(1, 11))

    def validate(self):
        if self.mode not in _MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.mode == "acceptance":
            if not self.criteria:
                raise UsageError("empty criteria selection")
            if any(c not in range(1, 11) for c in self.criteria):
                raise UsageError("criteria must be in 1..10")
            return
        if not self.scramblers or not self.integrands:
            raise UsageError("need at least one scrambler and one integrand")
        if self.repetitions < 1:
            raise UsageError("repetitions must be >= 1")
        if not self.m_values or any(m < 0 for m in self.m_values):
            raise UsageError("m values must be nonnegative and nonempty")
        if not self.r_values or any(r < 1 for r in self.r_values):
            raise UsageError("r values must be positive and nonempty")
        if self.base < 2:
            raise UsageError("base must be >= 2")
        for name in self.scramblers:
            try:
                kind = ScramblerKind(name)
            except ValueError:
                raise UsageError(f"unknown scrambler {name!r}") from None
            if kind in LINEAR_KINDS and not _is_prime(self.base):
                raise UsageError(f"scrambler {name!r} needs a prime base, got {self.base}")
        for name in self.integrands:
            if name not in builtin_names():
                raise UsageError(f"unknown integrand {name!r}")
        if self.mode == "convergence" and len(self.m_values) < 3:
            raise UsageError("convergence mode needs at least 3 m values")


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise UsageError(f"could not parse integer list for {flag}: {text!r}") from None


def _parse_config_file(path: Path) -> dict:
    keys = {"scramblers", "integrands", "base", "m", "r", "reps", "seed", "out", "shift"}
    out = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in keys:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = val
    return out


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    defaults = _MODE_DEFAULTS[args.mode]
    raw = dict(_parse_config_file(args.config)) if args.config else {}
    for flag in ("scramblers", "integrands", "m", "r", "reps", "seed", "out", "shift", "base"):
        val = getattr(args, flag, None)
        if val is not None:
            raw[flag] = val

    def pick(key, fallback):
        return raw.get(key, fallback)

    shift_text = str(pick("shift", "on")).lower()
    if shift_text not in ("on", "off"):
        raise UsageError(f"shift must be 'on' or 'off', got {shift_text!r}")

    def as_int(key, fallback):
        val = pick(key, fallback)
        try:
            return int(val)
        except (TypeError, ValueError):
            raise UsageError(f"could not parse integer for {key}: {val!r}") from None

    def as_list(key, fallback):
        val = pick(key, fallback)
        if isinstance(val, str):
            return _parse_int_list(val, key)
        return tuple(val)

    def as_names(key, fallback):
        val = pick(key, fallback)
        if isinstance(val, str):
            return tuple(tok.strip() for tok in val.split(",") if tok.strip())
        return tuple(val)

    criteria = tuple(range(1, 11))
    if args.mode == "acceptance" and args.criteria is not None:
        criteria = _parse_int_list(args.criteria, "--criteria")

    cfg = ExperimentConfig(
        mode=args.mode,
        scramblers=as_names("scramblers", defaults["scramblers"]),
        integrands=as_names("integrands", defaults["integrands"]),
        base=as_int("base", 2),
        m_values=as_list("m", defaults["m_values"]),
        r_values=as_list("r", defaults["r_values"]),
        repetitions=as_int("reps", defaults["repetitions"]),
        master_seed=as_int("seed", DEFAULT_SEED),
        out_dir=Path(pick("out", Path("results"))),
        shift=shift_text == "on",
        criteria=criteria,
    )
    cfg.validate()
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _batch_seed(master_seed: int, cell_index: int, rep: int) -> int:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(cell_index, rep))
    return int(ss.generate_state(1, np.uint64)[0])


def _cells(cfg: ExperimentConfig):
    idx = 0
    for scrambler in cfg.scramblers:
        for integrand in cfg.integrands:
            for m in cfg.m_values:
                for r in cfg.r_values:
                    yield idx, scrambler, integrand, m, r
                    idx += 1


def _row(scrambler, integrand, base, m, n, r, rep, value, rescaled, kind, seed) -> str:
    return (f"{scrambler},{integrand},{base},{m},{n},{r},{rep},"
            f"{_fmt(value)},{_fmt(rescaled)},{kind},{seed}")


def _write(path: Path, lines: list[str]):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _warn_even_r(cfg: ExperimentConfig):
    for r in cfg.r_values:
        if r > 1 and r % 2 == 0:
            print(f"warning: r={r} is even; the median uses the midpoint of the "
                  "two central order statistics", file=sys.stderr)


def run_histogram_mode(cfg: ExperimentConfig) -> int:
    """Per cell: repeated (median-of-r) estimates with rescaled errors and a
    60-bin density histogram on [-5, 5]; r = 1 rescales single estimates.

    Summary rows: rep 0 holds (variance of rescaled errors, out-of-range
    count); rep 1 holds the KS statistic against the standard normal.
    """
    _warn_even_r(cfg)
    n_cells = 0
    for idx, scrambler, integrand, m, r in _cells(cfg):
        f = builtin(integrand)
        if f.exact_sigma2 <= 0:
            raise UsageError(f"integrand {integrand!r} has zero gradient energy; "
                             "rescaled errors are undefined")
        spec = ScramblerSpec(ScramblerKind(scrambler), base=cfg.base, shift=cfg.shift)
        sigma = math.sqrt(f.exact_sigma2)
        n = cfg.base**m
        lines = [CSV_HEADER]
        values = np.empty(cfg.repetitions)
        seeds = []
        for rep in range(cfg.repetitions):
            seed = _batch_seed(cfg.master_seed, idx, rep)
            seeds.append(seed)
            values[rep] = median_estimator(replicate_batch(f, spec, m, r, seed))
        if r == 1:
            sample = stats.rescale_single(values, f.exact_integral, sigma, n)
        else:
            sample = stats.rescale_median(values, f.exact_integral, sigma, n, r)
        for rep in range(cfg.repetitions):
            lines.append(_row(scrambler, integrand, cfg.base, m, n, r, rep,
                              values[rep], sample.values[rep], "raw", seeds[rep]))
        hist = stats.histogram(sample)
        for b, (center, density) in enumerate(hist.pairs):
            lines.append(_row(scrambler, integrand, cfg.base, m, n, r, b,
                              center, density, "hist", cfg.master_seed))
        var = float(np.var(sample.values, ddof=1)) if cfg.repetitions > 1 else 0.0
        lines.append(_row(scrambler, integrand, cfg.base, m, n, r, 0,
                          var, float(hist.n_outside), "summary", cfg.master_seed))
        if cfg.repetitions >= 100:
            lines.append(_row(scrambler, integrand, cfg.base, m, n, r, 1,
                              stats.ks_statistic_normal(sample), 0.0,
                              "summary", cfg.master_seed))
        _write(cfg.out_dir / f"hist_{scrambler}_{integrand}_m{m}_r{r}.csv", lines)
        n_cells += 1
    print(f"histogram mode: wrote {n_cells} cell files to {cfg.out_dir}")
    return 0


def run_convergence_mode(cfg: ExperimentConfig) -> int:
    """Median-estimator error against n with fitted log-log slopes.

    Raw rows carry each outer repetition's median estimate and absolute
    error; a summary row per (scrambler, integrand, m, r) holds the median
    absolute error (rep 0); slope rows use m = -1, n = 0 and hold
    (slope, intercept).
    """
    _warn_even_r(cfg)
    lines = [CSV_HEADER]
    cell_errs: dict[tuple, list] = {}
    for idx, scrambler, integrand, m, r in _cells(cfg):
        f = builtin(integrand)
        spec = ScramblerSpec(ScramblerKind(scrambler), base=cfg.base, shift=cfg.shift)
        n = cfg.base**m
        abs_errs = np.empty(cfg.repetitions)
        for rep in range(cfg.repetitions):
            seed = _batch_seed(cfg.master_seed, idx, rep)
            med = median_estimator(replicate_batch(f, spec, m, r, seed))
            abs_errs[rep] = abs(med - f.exact_integral)
            lines.append(_row(scrambler, integrand, cfg.base, m, n, r, rep,
                              med, abs_errs[rep], "raw", seed))
        err = float(np.median(abs_errs))
        lines.append(_row(scrambler, integrand, cfg.base, m, n, r, 0, err, 0.0,
                          "summary", cfg.master_seed))
        cell_errs.setdefault((scrambler, integrand, r), []).append((n, err))
    for (scrambler, integrand, r), pts in sorted(cell_errs.items()):
        try:
            slope, intercept = stats.fit_slope(pts)
        except ValueError as exc:
            print(f"slope fit skipped for {scrambler}/{integrand}/r={r}: {exc}",
                  file=sys.stderr)
            continue
        lines.append(_row(scrambler, integrand, cfg.base, -1, 0, r, 0, slope,
                          intercept, "summary", cfg.master_seed))
    _write(cfg.out_dir / "convergence.csv", lines)
    print(f"convergence mode: wrote {cfg.out_dir / 'convergence.csv'}")
    return 0


def run_variance_mode(cfg: ExperimentConfig) -> int:
    """Per cell: empirical Var(Q) over the repetitions against sigma^2/n^3.

    Summary rows: rep 0 holds (empirical variance, theoretical variance);
    rep 1 holds their ratio (0 when the theoretical variance is 0).
    """
    lines = [CSV_HEADER]
    for idx, scrambler, integrand, m, r in _cells(cfg):
        f = builtin(integrand)
        spec = ScramblerSpec(ScramblerKind(scrambler), base=cfg.base, shift=cfg.shift)
        n = cfg.base**m
        seed = _batch_seed(cfg.master_seed, idx, 0)
        batch = replicate_batch(f, spec, m, cfg.repetitions, seed)
        est = np.asarray(batch.estimates)
        for rep, val in enumerate(est):
            lines.append(_row(scrambler, integrand, cfg.base, m, n, cfg.repetitions,
                              rep, val, 0.0, "raw", seed))
        emp = float(np.var(est, ddof=1)) if cfg.repetitions > 1 else 0.0
        theo = f.exact_sigma2 / n**3
        lines.append(_row(scrambler, integrand, cfg.base, m, n, cfg.repetitions, 0,
                          emp, theo, "summary", cfg.master_seed))
        lines.append(_row(scrambler, integrand, cfg.base, m, n, cfg.repetitions, 1,
                          emp / theo if theo > 0 else 0.0, 0.0, "summary",
                          cfg.master_seed))
    _write(cfg.out_dir / "variance.csv", lines)
    print(f"variance mode: wrote {cfg.out_dir / 'variance.csv'}")
    return 0


def run_acceptance_mode(cfg: ExperimentConfig) -> int:
    """Run the acceptance criteria, print one line per criterion, write the
    report and metrics CSV, and exit nonzero when anything fails."""
    results = acceptance.run_acceptance(cfg.master_seed, list(cfg.criteria))
    lines = []
    for res in results:
        summary = " ".join(f"{k}={v:.6g}" for k, v in res.measured.items())
        lines.append(f"{'PASS' if res.passed else 'FAIL'} {res.index:>2} "
                     f"{res.name}: {summary}")
    report = "\n".join(lines)
    print(report)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "acceptance_report.txt").write_text(report + "\n", encoding="utf-8")
    (cfg.out_dir / "acceptance_metrics.csv").write_text(
        acceptance.metrics_csv(results), encoding="utf-8")
    return 0 if all(res.passed for res in results) else 1


_MODE_RUNNERS = {
    "histogram": run_histogram_mode,
    "convergence": run_convergence_mode,
    "variance": run_variance_mode,
    "acceptance": run_acceptance_mode,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rqmc-median",
        description="Scrambled-net experiments: error histograms, convergence "
                    "sweeps, variance tables, and the acceptance suite.")
    parser.add_argument("mode", choices=_MODES)
    parser.add_argument("--config", type=Path, help="flat key=value config file")
    parser.add_argument("--seed", metavar="S", help="master seed (default 20250809)")
    parser.add_argument("--out", help="output directory (default results/)")
    parser.add_argument("--scramblers",
                        help="comma list: nested,jittered,matousek,tezuka,striped")
    parser.add_argument("--integrands", help="comma list: f1,f2,linear,constant")
    parser.add_argument("--m", help="comma list of net exponents (n = base**m)")
    parser.add_argument("--r", help="comma list of replicate counts")
    parser.add_argument("--reps", help="repetitions per cell")
    parser.add_argument("--base", help="net base (default 2)")
    parser.add_argument("--shift", choices=["on", "off"],
                        help="digital shift for linear kinds (default on)")
    parser.add_argument("--criteria", help="acceptance subset, e.g. 1,2,7")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = build_config(args)
        return _MODE_RUNNERS[cfg.mode](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())
