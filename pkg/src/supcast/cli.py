"""Command-line front end: experiment configuration, CSV emission, verification suites."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import verify
from .pipeline import SCHEMES, RunResult, Sweep, run_experiment
from .video_io import SYNTHETIC_KINDS, Gop, load_raw_video, synthetic_gop

CSV_COLUMNS = (
    "scheme",
    "seed",
    "snr_db",
    "beta",
    "user_id",
    "zone",
    "distance_m",
    "psnr_db",
    "mse_total",
    "mse_llse",
    "mse_discarded",
    "mse_undecodable_el",
)


class ConfigError(ValueError):
    """Invalid configuration value or key; maps to the usage exit code."""


@dataclass
class Config:
    """Resolved run settings; defaults mirror the reference simulation setup."""

    input: str | None = None
    synthetic: str | None = None
    width: int = 352
    height: int = 288
    gop: int = 4
    num_gops: int = 1
    chunks_per_side: int = 8
    beta: float = 0.5
    snr: tuple[float, ...] = (15.0,)
    schemes: tuple[str, ...] = ("supcast_bl", "softcast", "noma_ra")
    eta: float = 2.0
    seeds: tuple[int, ...] = (0,)
    master_seed: int = 0
    users_per_zone: int = 5
    near_radius: tuple[float, float] = (100.0, 500.0)
    far_radius: tuple[float, float] = (500.0, 900.0)
    p_chunk: float = 1.0
    ref_distance: float = 300.0
    clamp_pixels: bool = False
    out: str = "results.csv"


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in str(text).split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"cannot parse float list {text!r}") from exc


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in str(text).split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"cannot parse int list {text!r}") from exc


def _parse_str_list(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in str(text).split(",") if tok.strip() != "")


def _parse_pair(text: str) -> tuple[float, float]:
    vals = _parse_float_list(text)
    if len(vals) != 2:
        raise ConfigError(f"expected 'min,max', got {text!r}")
    return vals  # type: ignore[return-value]


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


# config-file parsers keyed by Config field name
_FIELD_PARSERS = {
    "input": str,
    "synthetic": str,
    "width": int,
    "height": int,
    "gop": int,
    "num_gops": int,
    "chunks_per_side": int,
    "beta": float,
    "snr": _parse_float_list,
    "schemes": _parse_str_list,
    "eta": float,
    "seeds": _parse_int_list,
    "master_seed": int,
    "users_per_zone": int,
    "near_radius": _parse_pair,
    "far_radius": _parse_pair,
    "p_chunk": float,
    "ref_distance": float,
    "clamp_pixels": _parse_bool,
    "out": str,
}


def _read_config_file(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    overrides = {}
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            overrides[key] = _FIELD_PARSERS[key](value.strip())
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value.strip()!r}") from exc
    return overrides


def _validate(cfg: Config) -> Config:
    if cfg.input is None and cfg.synthetic is None:
        raise ConfigError("a video source is required: pass --input or --synthetic")
    if cfg.input is not None and cfg.synthetic is not None:
        raise ConfigError("--input and --synthetic are mutually exclusive")
    if cfg.synthetic is not None and cfg.synthetic not in SYNTHETIC_KINDS:
        raise ConfigError(f"synthetic kind must be one of {SYNTHETIC_KINDS}, got {cfg.synthetic!r}")
    if cfg.width <= 0 or cfg.height <= 0:
        raise ConfigError("width and height must be positive")
    if cfg.gop < 1:
        raise ConfigError("gop must be >= 1")
    if cfg.num_gops < 1:
        raise ConfigError("num_gops must be >= 1")
    if not 0.0 < cfg.beta <= 1.0:
        raise ConfigError(f"beta must lie in (0, 1], got {cfg.beta}")
    if cfg.width % cfg.chunks_per_side or cfg.height % cfg.chunks_per_side:
        raise ConfigError(
            f"width and height must be divisible by chunks_per_side={cfg.chunks_per_side}"
        )
    chunk_len = (cfg.width // cfg.chunks_per_side) * (cfg.height // cfg.chunks_per_side)
    if chunk_len % 2:
        raise ConfigError("chunk length must be even to pack complex symbols")
    if not cfg.snr:
        raise ConfigError("snr list must not be empty")
    if not cfg.seeds:
        raise ConfigError("seeds list must not be empty")
    if any(s < 0 for s in cfg.seeds) or cfg.master_seed < 0:
        raise ConfigError("seeds must be nonnegative")
    for scheme in cfg.schemes:
        if scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if cfg.users_per_zone < 1:
        raise ConfigError("users_per_zone must be >= 1")
    if cfg.p_chunk <= 0.0:
        raise ConfigError("p_chunk must be positive")
    if cfg.ref_distance <= 0.0:
        raise ConfigError("ref_distance must be positive")
    return cfg


def parse_config(args: argparse.Namespace) -> Config:
    """Merge defaults, config-file entries, then explicit flags; validate the result."""
    values = {f.name: f.default for f in fields(Config)}
    if args.config:
        values.update(_read_config_file(args.config))
    explicit = {
        name: getattr(args, name)
        for name in values
        if getattr(args, name, None) is not None
    }
    # an explicit source flag supersedes a file-configured source of the other kind
    if "input" in explicit and "synthetic" not in explicit:
        values["synthetic"] = None
    if "synthetic" in explicit and "input" not in explicit:
        values["input"] = None
    values.update(explicit)
    return _validate(Config(**values))


def _load_gops(cfg: Config) -> list[Gop]:
    if cfg.input is not None:
        gops = load_raw_video(cfg.input, cfg.width, cfg.height, cfg.gop)
        if not gops:
            raise RuntimeError(f"{cfg.input} holds no complete {cfg.gop}-frame GOP")
        return gops
    return [
        synthetic_gop(cfg.synthetic, cfg.width, cfg.height, cfg.gop, seed=cfg.master_seed + k)
        for k in range(cfg.num_gops)
    ]


def _format_row(row: RunResult) -> str:
    return ",".join(
        (
            row.scheme,
            str(row.seed),
            f"{row.snr_db:g}",
            f"{row.beta:g}",
            str(row.user_id),
            row.zone,
            f"{row.distance_m:.4f}",
            f"{row.psnr_db:.6f}",
            f"{row.mse_total:.10e}",
            f"{row.mse_llse:.10e}",
            f"{row.mse_discarded:.10e}",
            f"{row.mse_undecodable_el:.10e}",
        )
    )


def write_csv(path, rows: list[RunResult]) -> None:
    """UTF-8 CSV with a fixed header, LF line endings."""
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(_format_row(r) for r in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def cmd_run(cfg: Config) -> Path:
    """Execute the configured sweep and write one CSV row per (cell, user)."""
    gops = _load_gops(cfg)
    sweep = Sweep(
        schemes=list(cfg.schemes),
        snr_db=list(cfg.snr),
        betas=[cfg.beta],
        seeds=list(cfg.seeds),
        chunks_per_side=cfg.chunks_per_side,
        eta=cfg.eta,
        p_chunk=cfg.p_chunk,
        users_per_zone=cfg.users_per_zone,
        near_radius=cfg.near_radius,
        far_radius=cfg.far_radius,
        ref_distance=cfg.ref_distance,
        master_seed=cfg.master_seed,
        clamp=cfg.clamp_pixels,
    )
    rows = run_experiment(gops, sweep)
    out = Path(cfg.out)
    write_csv(out, rows)
    return out


def cmd_verify(suites: list[str], fast: bool = False) -> int:
    """Run the requested oracle suites and print one line per property."""
    names = list(verify.SUITES) if suites == ["all"] else suites
    results = verify.run_suites(names, fast=fast)
    for res in results:
        print(res.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supcast",
        description="Superposed video multicast link simulator and baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment sweep and write a CSV")
    run_p.add_argument("--config", help="flat key=value config file")
    run_p.add_argument("--input", help="headerless 8-bit luminance video file")
    run_p.add_argument("--synthetic", choices=SYNTHETIC_KINDS, help="generate the source instead")
    run_p.add_argument("--width", type=int)
    run_p.add_argument("--height", type=int)
    run_p.add_argument("--gop", type=int, help="frames per GOP")
    run_p.add_argument("--num-gops", dest="num_gops", type=int, help="synthetic GOP count")
    run_p.add_argument("--chunks-per-side", dest="chunks_per_side", type=int)
    run_p.add_argument("--beta", type=float, help="bandwidth compression ratio in (0,1]")
    run_p.add_argument("--snr", type=_parse_float_list, help="comma list of channel SNRs in dB")
    run_p.add_argument("--schemes", type=_parse_str_list, help="comma list of schemes")
    run_p.add_argument("--eta", type=float, help="path-loss exponent")
    run_p.add_argument("--seeds", type=_parse_int_list, help="comma list of trial seeds")
    run_p.add_argument("--master-seed", dest="master_seed", type=int)
    run_p.add_argument("--users-per-zone", dest="users_per_zone", type=int)
    run_p.add_argument("--near-radius", dest="near_radius", type=_parse_pair, help="min,max meters")
    run_p.add_argument("--far-radius", dest="far_radius", type=_parse_pair, help="min,max meters")
    run_p.add_argument("--p-chunk", dest="p_chunk", type=float, help="per-chunk power (W)")
    run_p.add_argument("--ref-distance", dest="ref_distance", type=float,
                       help="path-loss reference distance (m)")
    run_p.add_argument("--clamp-pixels", dest="clamp_pixels", action="store_const", const=True,
                       help="clamp reconstructed pixels to [0,255] before scoring")
    run_p.add_argument("--out", help="output CSV path")

    ver_p = sub.add_parser("verify", help="run brute-force oracle suites")
    ver_p.add_argument("suites", nargs="*", default=["all"],
                       choices=[*verify.SUITES, "all"], help="which suites to run")
    ver_p.add_argument("--fast", action="store_true", help="smaller sample sizes")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        suites = args.suites if args.suites else ["all"]
        return cmd_verify(suites, fast=args.fast)

    try:
        cfg = parse_config(args)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        out = cmd_run(cfg)
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
