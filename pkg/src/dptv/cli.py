"""Command-line driver for denoising runs, weight inspection and sweeps.

Commands:
  denoise   run one model on an image, write the result and a run report
  sweep     cross product of models x lambdas x sigmas, one CSV row per run
  weight    emit the weight-construction artifacts for an image
  metrics   compare a reconstruction against a reference image
  synth     generate a synthetic test image or signal

Every flag can also be given in a flat ``key = value`` config file passed
via --config; command-line flags override file entries. Errors print a
single machine-readable ``error: <kind>: <message>`` line on stderr and
exit nonzero. Exit status 3 marks runs that stopped without reaching the
requested tolerance (unless --allow-nonconverged is set).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .grids import NoiseSpec, add_gaussian_noise, gradient, mollify
from .images import (
    ImageFormatError,
    load_image,
    make_synthetic,
    save_image,
    SYNTHETIC_KINDS,
)
from .metrics import CSV_HEADER, compute_metrics, format_metric_row
from .pipeline import MODELS, default_config, run_model
from .weights import WeightSpec, build_weight_adaptive, build_weight_noisy, eval_weight_function

__all__ = ["main"]

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3

# flag name (as written in config files) -> parsed type
_BOOL_FLAGS = {"standard", "allow-nonconverged"}
_FLOAT_LIST_FLAGS = {"lambdas", "sigmas"}
_INT_FLAGS = {"seed", "max-iters", "size", "jumps"}
_FLOAT_FLAGS = {
    "lambda", "alpha", "a", "b", "height", "cutoff", "radius", "sigma", "epsilon",
}


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def _parse_float_list(text: str) -> list[float]:
    values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    if not values:
        raise ValueError(f"empty numeric list {text!r}")
    return values


def _coerce(flag: str, raw: str):
    try:
        if flag in _BOOL_FLAGS:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if flag in _FLOAT_LIST_FLAGS:
            return _parse_float_list(raw)
        if flag in _INT_FLAGS:
            return int(raw)
        if flag in _FLOAT_FLAGS:
            return float(raw)
    except ValueError as exc:
        raise CliError("config", f"bad value for {flag}: {raw!r}") from exc
    return raw


def _read_config_file(path: str) -> dict:
    entries = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise CliError("config", f"{path}:{lineno}: expected key = value")
                key, raw = line.split("=", 1)
                entries[key.strip()] = _coerce(key.strip(), raw.strip())
    except FileNotFoundError as exc:
        raise CliError("io", f"config file not found: {path}") from exc
    return entries


def _apply_config(args: argparse.Namespace, flag_to_dest: dict) -> None:
    if not getattr(args, "config", None):
        return
    entries = _read_config_file(args.config)
    for flag, value in entries.items():
        if flag not in flag_to_dest:
            raise CliError("config", f"unknown config key {flag!r}")
        dest = flag_to_dest[flag]
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)


def _add(parser, flag_map, *names, **kwargs):
    action = parser.add_argument(*names, **kwargs)
    flag_map[names[0].lstrip("-")] = action.dest
    return action


def _run_flags(parser) -> dict:
    flag_map = {}
    _add(parser, flag_map, "--model", type=str, help="rof | huber | dp-adaptive | dp-noisy")
    _add(parser, flag_map, "--lambda", dest="lam", type=float, help="fidelity weight")
    _add(parser, flag_map, "--alpha", type=float, help="Huber threshold (huber model only)")
    _add(parser, flag_map, "--weight-family", type=str, help="w1 | w2 | w3 (dp models)")
    _add(parser, flag_map, "--a", type=float, help="w1/w2 parameter a")
    _add(parser, flag_map, "--b", type=float, help="w1/w2 parameter b")
    _add(parser, flag_map, "--height", type=float, help="w3 plateau height")
    _add(parser, flag_map, "--cutoff", type=float, help="w3 support end")
    _add(parser, flag_map, "--radius", type=float, help="mollification radius in pixels")
    _add(parser, flag_map, "--sigma", type=float, help="noise standard deviation to add")
    _add(parser, flag_map, "--seed", type=int, help="noise RNG seed")
    _add(parser, flag_map, "--epsilon", type=float, help="relative-change stopping tolerance")
    _add(parser, flag_map, "--max-iters", type=int, help="iteration cap per solve")
    _add(parser, flag_map, "--standard", action="store_const", const=True,
         help="use the fixed-step variant instead of the accelerated one")
    _add(parser, flag_map, "--input", type=str, help="input image (PGM or PNG)")
    _add(parser, flag_map, "--original", type=str, help="clean reference image for metrics")
    _add(parser, flag_map, "--output", type=str, help="output path")
    _add(parser, flag_map, "--csv", type=str, help="append metric rows to this CSV file")
    _add(parser, flag_map, "--allow-nonconverged", action="store_const", const=True,
         help="exit 0 even when a solve hits the iteration cap")
    parser.add_argument("--config", type=str, help="flat key = value config file")
    return flag_map


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="dptv", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    flag_maps = {}

    p = sub.add_parser("denoise", help="denoise one image with one model")
    flag_maps["denoise"] = _run_flags(p)

    p = sub.add_parser("sweep", help="run models over lambda and sigma lists")
    fm = _run_flags(p)
    _add(p, fm, "--lambdas", type=_parse_float_list, help="comma-separated lambda list")
    _add(p, fm, "--sigmas", type=_parse_float_list, help="comma-separated sigma list")
    flag_maps["sweep"] = fm

    p = sub.add_parser("weight", help="emit weight-construction artifacts")
    flag_maps["weight"] = _run_flags(p)

    p = sub.add_parser("metrics", help="compare a result against a reference")
    flag_maps["metrics"] = _run_flags(p)

    p = sub.add_parser("synth", help="generate a synthetic test image")
    fm = {}
    _add(p, fm, "--kind", type=str, help="|".join(SYNTHETIC_KINDS))
    _add(p, fm, "--size", type=int, help="grid size (>= 16)")
    _add(p, fm, "--jumps", type=int, help="jump count for 'saw'")
    _add(p, fm, "--output", type=str, help="output path")
    p.add_argument("--config", type=str, help="flat key = value config file")
    flag_maps["synth"] = fm

    return parser, flag_maps


def _require(args, name: str, flag: str):
    value = getattr(args, name, None)
    if value is None:
        raise CliError("config", f"{flag} is required for this command")
    return value


def _fill_run_defaults(args) -> None:
    if args.sigma is None:
        args.sigma = 0.0
    if args.seed is None:
        args.seed = 0
    if args.epsilon is None:
        args.epsilon = 1e-4
    if args.max_iters is None:
        args.max_iters = 20000
    if args.standard is None:
        args.standard = False
    if args.allow_nonconverged is None:
        args.allow_nonconverged = False


def _weight_spec_from_args(args) -> WeightSpec:
    family = _require(args, "weight_family", "--weight-family")
    if family not in ("w1", "w2", "w3"):
        raise CliError("config", f"unknown weight family {family!r}")
    if args.radius is None:
        raise CliError("config", "--radius is required for double-phase models")
    try:
        if family in ("w1", "w2"):
            if args.a is None or args.b is None:
                raise CliError("config", f"family {family} requires --a and --b")
            return WeightSpec(family=family, a=args.a, b=args.b, radius=args.radius)
        if args.height is None or args.cutoff is None:
            raise CliError("config", "family w3 requires --height and --cutoff")
        return WeightSpec(family=family, height=args.height, cutoff=args.cutoff,
                          radius=args.radius)
    except ValueError as exc:
        raise CliError("config", str(exc)) from exc


def _validate_model_params(args, models: list[str]) -> None:
    for model in models:
        if model not in MODELS:
            raise CliError("config", f"unknown model {model!r}")
    if "huber" in models:
        if args.alpha is None:
            raise CliError("config", "--alpha is required for the huber model")
    elif args.alpha is not None:
        raise CliError("config", "--alpha applies only to the huber model")
    weight_flags = [args.weight_family, args.a, args.b, args.height, args.cutoff]
    if not any(m.startswith("dp") for m in models) and any(
        v is not None for v in weight_flags
    ):
        raise CliError("config", "weight parameters apply only to dp-* models")


def _load_field(path: str) -> np.ndarray:
    try:
        return load_image(path)
    except FileNotFoundError as exc:
        raise CliError("io", str(exc)) from exc
    except ImageFormatError as exc:
        raise CliError("format", str(exc)) from exc


def _model_row_params(model: str, args, spec: WeightSpec | None):
    alpha = args.alpha if model == "huber" else None
    a = b = r = None
    if spec is not None:
        a, b, r = spec.a, spec.b, spec.radius
        if spec.family == "w3":
            a = b = None
    return alpha, a, b, r


def _print_report(report, sigma: float, seed: int, stream=None) -> None:
    if stream is None:
        stream = sys.stdout
    lines = [
        ("model", report.model),
        ("lambda", report.lam),
        ("sigma", sigma),
        ("seed", seed),
    ]
    if report.alpha is not None:
        lines.append(("alpha", report.alpha))
    if report.weight_spec is not None:
        spec = report.weight_spec
        lines.append(("weight_family", spec.family))
        if spec.family == "w3":
            lines.extend([("height", spec.height), ("cutoff", spec.cutoff)])
        else:
            lines.extend([("a", spec.a), ("b", spec.b)])
        lines.append(("radius", spec.radius))
    lines.extend([
        ("iterations", report.iterations),
        ("residual", f"{report.residual:.6g}"),
        ("converged", str(report.converged).lower()),
    ])
    if report.pre_iterations is not None:
        lines.extend([
            ("pre_iterations", report.pre_iterations),
            ("pre_residual", f"{report.pre_residual:.6g}"),
            ("pre_converged", str(report.pre_converged).lower()),
        ])
    if report.metrics is not None:
        met = report.metrics
        lines.extend([
            ("d_tv", f"{met.d_tv:.10g}"),
            ("d_l2", f"{met.d_l2:.10g}"),
            ("psnr", f"{met.psnr:.10g}"),
            ("ssim", f"{met.ssim:.10g}"),
        ])
        if met.d_l2_noisy is not None:
            lines.append(("d_l2_noisy", f"{met.d_l2_noisy:.10g}"))
    for key, value in lines:
        stream.write(f"{key} = {value}\n")


def _open_csv(path: str | None):
    if path is None:
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8", newline="\n"), True
    except OSError as exc:
        raise CliError("io", f"cannot write {path}: {exc}") from exc


def cmd_denoise(args) -> int:
    _fill_run_defaults(args)
    model = _require(args, "model", "--model")
    _validate_model_params(args, [model])
    lam = _require(args, "lam", "--lambda")
    field = _load_field(_require(args, "input", "--input"))

    spec = _weight_spec_from_args(args) if model.startswith("dp") else None
    if args.sigma > 0:
        datum = add_gaussian_noise(field, NoiseSpec(args.sigma, args.seed))
        reference = _load_field(args.original) if args.original else field
    else:
        datum = field
        reference = _load_field(args.original) if args.original else None

    cfg = default_config(lam, epsilon=args.epsilon, max_iters=args.max_iters,
                         accelerated=not args.standard)
    result = run_model(model, datum, lam, cfg, alpha=args.alpha, weight_spec=spec)
    if reference is not None:
        result.report.metrics = compute_metrics(result.u, reference, noisy=datum)

    if args.output:
        try:
            save_image(result.u, args.output)
        except (OSError, ValueError) as exc:
            raise CliError("io", f"cannot write {args.output}: {exc}") from exc

    _print_report(result.report, args.sigma, args.seed)

    if args.csv and result.report.metrics is not None:
        alpha, a, b, r = _model_row_params(model, args, spec)
        stream, owned = _open_csv(args.csv)
        try:
            stream.write(CSV_HEADER + "\n")
            stream.write(format_metric_row(
                model, lam, args.sigma, alpha, a, b, r,
                result.report.metrics, result.report.iterations,
                result.report.all_converged) + "\n")
        finally:
            if owned:
                stream.close()

    if not result.report.all_converged and not args.allow_nonconverged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


_SUMMARY_METRICS = (
    ("d_tv", "min"), ("d_l2", "min"), ("psnr", "max"), ("ssim", "max"),
)


def cmd_sweep(args) -> int:
    _fill_run_defaults(args)
    models = [m.strip() for m in _require(args, "model", "--model").split(",")]
    _validate_model_params(args, models)
    lambdas = _require(args, "lambdas", "--lambdas")
    sigmas = args.sigmas if args.sigmas is not None else [args.sigma]
    original = _load_field(_require(args, "input", "--input"))
    spec = (_weight_spec_from_args(args)
            if any(m.startswith("dp") for m in models) else None)

    stream, owned = _open_csv(args.csv)
    all_converged = True
    records = []
    try:
        stream.write(CSV_HEADER + "\n")
        stream.flush()
        for si, sigma in enumerate(sigmas):
            # one noise draw per sigma so the models compete on identical data
            seed = args.seed + si
            datum = (add_gaussian_noise(original, NoiseSpec(sigma, seed))
                     if sigma > 0 else original)
            for model in models:
                for lam in lambdas:
                    cfg = default_config(lam, epsilon=args.epsilon,
                                         max_iters=args.max_iters,
                                         accelerated=not args.standard)
                    result = run_model(model, datum, lam, cfg, alpha=args.alpha,
                                       weight_spec=spec if model.startswith("dp") else None)
                    met = compute_metrics(result.u, original, noisy=datum)
                    converged = result.report.all_converged
                    all_converged = all_converged and converged
                    alpha, a, b, r = _model_row_params(model, args, spec)
                    row = format_metric_row(model, lam, sigma, alpha, a, b, r, met,
                                            result.report.iterations, converged)
                    stream.write(row + "\n")
                    stream.flush()
                    records.append((model, sigma, lam, met))
        for model in models:
            for sigma in sigmas:
                cell = [rec for rec in records if rec[0] == model and rec[1] == sigma]
                for metric, mode in _SUMMARY_METRICS:
                    pick = (min if mode == "min" else max)(
                        cell, key=lambda rec: getattr(rec[3], metric))
                    stream.write(
                        f"# best,model={model},sigma={sigma:.10g},metric={metric},"
                        f"lambda={pick[2]:.10g},value={getattr(pick[3], metric):.10g}\n")
        stream.flush()
    finally:
        if owned:
            stream.close()
    if not all_converged and not args.allow_nonconverged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _strip_extension(path: str) -> tuple[str, str]:
    lower = path.lower()
    for ext in (".pgm", ".png"):
        if lower.endswith(ext):
            return path[: -len(ext)], ext[1:]
    return path, "pgm"


def cmd_weight(args) -> int:
    _fill_run_defaults(args)
    model = args.model or "dp-adaptive"
    if model not in ("dp-adaptive", "dp-noisy"):
        raise CliError("config", "weight command expects --model dp-adaptive or dp-noisy")
    spec = _weight_spec_from_args(args)
    field = _load_field(_require(args, "input", "--input"))
    if args.sigma > 0:
        field = add_gaussian_noise(field, NoiseSpec(args.sigma, args.seed))
    base, ext = _strip_extension(_require(args, "output", "--output"))

    converged = True
    if model == "dp-adaptive":
        lam = _require(args, "lam", "--lambda")
        cfg = default_config(lam, epsilon=args.epsilon, max_iters=args.max_iters,
                             accelerated=not args.standard)
        w, u_pre, report = build_weight_adaptive(field, lam, spec, cfg)
        smooth_source = u_pre
        converged = bool(report.rof_converged)
        print(f"rof_iterations = {report.rof_iterations}")
        print(f"rof_converged = {str(report.rof_converged).lower()}")
    else:
        w, report = build_weight_noisy(field, spec)
        smooth_source = field
    print(f"max_gradient = {report.max_gradient:.10g}")
    print(f"support_fraction = {report.support_fraction:.10g}")

    p = gradient(mollify(smooth_source, spec.radius))
    mag = np.sqrt(p[0] * p[0] + p[1] * p[1])
    scale = mag.max() if mag.max() > 0 else 1.0
    try:
        save_image(mag / scale, f"{base}.grad.{ext}")
        save_image(w / spec.w0, f"{base}.weight.{ext}")
        xs = np.linspace(0.0, report.max_gradient, 257)
        with open(f"{base}.curve.csv", "w", encoding="utf-8") as fh:
            fh.write("x,w\n")
            for x, val in zip(xs, eval_weight_function(spec, xs)):
                fh.write(f"{x:.10g},{val:.10g}\n")
        np.savetxt(f"{base}.weight.csv", w, fmt="%.10g", delimiter=",")
    except OSError as exc:
        raise CliError("io", f"cannot write weight artifacts: {exc}") from exc

    if not converged and not args.allow_nonconverged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_metrics(args) -> int:
    _fill_run_defaults(args)
    result = _load_field(_require(args, "input", "--input"))
    original = _load_field(_require(args, "original", "--original"))
    try:
        met = compute_metrics(result, original)
    except ValueError as exc:
        raise CliError("config", str(exc)) from exc
    print(f"d_tv = {met.d_tv:.10g}")
    print(f"d_l2 = {met.d_l2:.10g}")
    print(f"psnr = {met.psnr:.10g}")
    print(f"ssim = {met.ssim:.10g}")
    if args.csv:
        stream, owned = _open_csv(args.csv)
        try:
            stream.write(CSV_HEADER + "\n")
            stream.write(format_metric_row(args.model or "metrics", None,
                                           None, None, None, None, None, met, 0, True)
                         + "\n")
        finally:
            if owned:
                stream.close()
    return EXIT_OK


def cmd_synth(args) -> int:
    kind = _require(args, "kind", "--kind")
    size = _require(args, "size", "--size")
    output = _require(args, "output", "--output")
    try:
        field = make_synthetic(kind, size, n_jumps=args.jumps or 6)
        save_image(field, output)
    except ValueError as exc:
        raise CliError("config", str(exc)) from exc
    except OSError as exc:
        raise CliError("io", f"cannot write {output}: {exc}") from exc
    return EXIT_OK


_COMMANDS = {
    "denoise": cmd_denoise,
    "sweep": cmd_sweep,
    "weight": cmd_weight,
    "metrics": cmd_metrics,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser, flag_maps = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, flag_maps[args.command])
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return EXIT_CONFIG if exc.kind == "config" else EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
