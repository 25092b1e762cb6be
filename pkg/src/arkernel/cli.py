"""Command line benchmark harness.

Subcommands: gen-toy (synthetic VAR datasets), gram (pairwise matrices),
classify (SVM benchmark with model selection) and approx-study (low-rank
accuracy/speed sweep).  Report-producing subcommands render a PNG figure
next to the delimited output.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .ar import ArParams, ar_dissimilarity
from .baselines import bov_dissimilarity, ga_dissimilarity
from .dataio import load_dataset, save_dataset
from .errors import ArKernelError, DegenerateScale
from .gram import KernelMatrix, gram_matrix, save_kernel_matrix
from .kernelized import (
    ApproxConfig,
    BaseKernelSpec,
    kernelized_dissimilarity,
    kernelized_dissimilarity_lowrank,
    median_bandwidth,
    median_heuristic_sigma_sq,
)
from .series import LabeledDataset, TimeSeries
from .svm import SelectionGrid, select_and_evaluate
from .study import DEFAULT_TAUS, approx_tradeoff_study
from .toy import ToyModelSpec, generate_toy_split

log = logging.getLogger("arkernel")

SIGMA_SQ_FLOOR = 1e-12
KERNELS = ("ar", "ark", "bov", "ga")


class UsageError(Exception):
    pass


def _center_each_series(ds: LabeledDataset) -> LabeledDataset:
    series = [
        TimeSeries(ts.values - ts.values.mean(axis=1, keepdims=True))
        for ts in ds.series
    ]
    return LabeledDataset(series, ds.labels, ds.class_count)


def _load(path, center: bool) -> LabeledDataset:
    ds = load_dataset(path)
    return _center_each_series(ds) if center else ds


def _resolve_sigma_sq(text: str, scale_ds: LabeledDataset, seed: int) -> float:
    if text != "auto":
        value = float(text)
        if value <= 0:
            raise UsageError("--sigma-sq must be positive")
        return value
    try:
        return median_heuristic_sigma_sq(scale_ds, seed=seed)
    except DegenerateScale:
        log.warning(
            "median-distance heuristic collapsed to zero; flooring sigma_sq at %g",
            SIGMA_SQ_FLOOR,
        )
        return SIGMA_SQ_FLOOR


def _make_evaluator(args, scale_ds: LabeledDataset):
    """Dissimilarity evaluator (x, x') -> float for the requested kernel."""
    kernel = args.kernel
    if kernel == "ar":
        params = ArParams(p=args.p, alpha=args.alpha)
        method = getattr(args, "method", "auto")
        return lambda a, b: ar_dissimilarity(a, b, params, method=method)
    if kernel == "ark":
        if args.base == "linear":
            k1 = BaseKernelSpec("linear", arity="window")
            k2 = BaseKernelSpec("linear", arity="point")
        else:
            sigma_sq = _resolve_sigma_sq(args.sigma_sq, scale_ds, args.seed)
            k1 = BaseKernelSpec("gaussian", sigma_sq, arity="window")
            k2 = BaseKernelSpec("gaussian", sigma_sq, arity="point")
        if getattr(args, "tau", None) is not None:
            if getattr(args, "bandwidth", None) is None:
                raise UsageError("--tau needs an explicit --bandwidth for the stopping rule")
            cfg = ApproxConfig(tau=args.tau, bandwidth=args.bandwidth)
            return lambda a, b: kernelized_dissimilarity_lowrank(
                a, b, args.p, args.alpha, k1, k2, cfg
            )[0]
        return lambda a, b: kernelized_dissimilarity(a, b, args.p, args.alpha, k1, k2)
    sigma_sq = _resolve_sigma_sq(args.sigma_sq, scale_ds, args.seed)
    base = BaseKernelSpec("gaussian", sigma_sq, arity="point")
    if kernel == "bov":
        return lambda a, b: bov_dissimilarity(a, b, base)
    if kernel == "ga":
        return lambda a, b: ga_dissimilarity(a, b, base)
    raise UsageError(f"unknown kernel {kernel!r}")


def _write_tsv(path, header: list[str], rows: list[list]) -> None:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def cmd_gen_toy(args) -> int:
    try:
        spec = ToyModelSpec(
            d=args.d,
            n=args.n,
            density=args.density,
            noise_variance=args.noise_variance,
            spectral_target=args.spectral_radius,
            init_range=args.init_range,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.train_per_class < 1 or args.test_per_class < 1 or args.classes < 2:
        raise UsageError("need trains/tests >= 1 per class and at least 2 classes")
    train, test = generate_toy_split(
        spec, args.train_per_class, args.test_per_class, args.classes
    )
    out = Path(args.out)
    save_dataset(train, out / "train")
    save_dataset(test, out / "test")
    params = [
        ("d", args.d),
        ("n", args.n),
        ("density", args.density),
        ("noise_variance", args.noise_variance),
        ("spectral_radius", args.spectral_radius),
        ("init_range", args.init_range),
        ("seed", args.seed),
        ("train_per_class", args.train_per_class),
        ("test_per_class", args.test_per_class),
        ("classes", args.classes),
    ]
    _write_tsv(out / "spec.tsv", ["parameter", "value"], [list(kv) for kv in params])
    print(f"wrote {out / 'train'} and {out / 'test'}")
    return 0


def cmd_gram(args) -> int:
    ds = _load(args.data, args.center)
    evaluator = _make_evaluator(args, ds)
    is_ar_family = args.kernel in ("ar", "ark")
    km = gram_matrix(
        ds,
        evaluator,
        kernel=args.kernel,
        p=args.p if is_ar_family else None,
        alpha=args.alpha if is_ar_family else None,
        workers=args.workers,
    )
    phi_values = km.values
    if args.matrix == "kernel":
        if args.bandwidth is None:
            bandwidth = median_bandwidth(km)
        else:
            bandwidth = args.bandwidth
        km = KernelMatrix(
            np.exp(-phi_values / bandwidth),
            kernel=km.kernel,
            p=km.p,
            alpha=km.alpha,
            bandwidth=bandwidth,
        )
    extra = []
    for t in args.psd_check or []:
        eigs = np.linalg.eigvalsh(np.exp(-phi_values / t))
        extra.append(f"psd-check t={t:g} min_eig={eigs.min():.17g} max_eig={eigs.max():.17g}")
    save_kernel_matrix(km, args.out, extra_comments=extra)
    print(f"wrote {args.out} ({km.values.shape[0]}x{km.values.shape[1]})")
    return 0


def cmd_classify(args) -> int:
    train = _load(args.train, args.center)
    test = _load(args.test, args.center)
    evaluator = _make_evaluator(args, train)
    grid = SelectionGrid(folds=args.folds)
    report = select_and_evaluate(
        train,
        test,
        evaluator,
        grid,
        kernel=args.kernel,
        seed=args.seed,
        workers=args.workers,
    )
    out = Path(args.out)
    _write_tsv(
        out,
        ["kernel", "C", "t", "cv_error", "test_error", "wall_time_seconds"],
        [[
            report.kernel,
            report.chosen_c,
            report.chosen_bandwidth,
            report.cv_error,
            report.test_error,
            report.wall_time_seconds,
        ]],
    )
    cells_path = out.with_name(out.stem + "_cells" + out.suffix)
    _write_tsv(
        cells_path,
        ["kernel", "C", "multiplier", "t", "cv_error"],
        [[report.kernel, c.C, c.multiplier, c.bandwidth, c.cv_error] for c in report.cells],
    )
    from .figures import render_classification_figure

    figure_path = out.with_suffix(".png")
    render_classification_figure(report, figure_path)
    print(
        f"kernel={report.kernel} C={report.chosen_c:g} t={report.chosen_bandwidth:.6g} "
        f"cv_error={report.cv_error:.4f} test_error={report.test_error:.4f}"
    )
    print(f"wrote {out}, {cells_path}, {figure_path}")
    return 0


def cmd_approx_study(args) -> int:
    ds = _load(args.data, args.center)
    sigma_sq = _resolve_sigma_sq(args.sigma_sq, ds, args.seed)
    kappa1 = BaseKernelSpec("gaussian", sigma_sq, arity="window")
    kappa2 = BaseKernelSpec("gaussian", sigma_sq, arity="point")
    taus = args.taus if args.taus else list(DEFAULT_TAUS)
    rows, bandwidth = approx_tradeoff_study(
        ds,
        args.p,
        args.alpha,
        kappa1,
        kappa2,
        taus=taus,
        bandwidth=args.bandwidth,
        cap=args.cap,
    )
    out = Path(args.out)
    _write_tsv(
        out,
        [
            "tau",
            "mean_eval_seconds",
            "mean_rank1",
            "mean_rank2",
            "phi_gap_max",
            "phi_gap_fro",
            "kernel_gap_max",
            "kernel_gap_fro",
        ],
        [
            [
                r.tau,
                r.mean_eval_seconds,
                r.mean_rank1,
                r.mean_rank2,
                r.phi_gap_max,
                r.phi_gap_fro,
                r.kernel_gap_max,
                r.kernel_gap_fro,
            ]
            for r in rows
        ],
    )
    from .figures import render_study_figure

    figure_path = out.with_suffix(".png")
    render_study_figure(rows, figure_path)
    print(f"bandwidth={bandwidth:.6g}; wrote {out} and {figure_path}")
    return 0


def _positive_float_list(text: str) -> list[float]:
    values = [float(tok) for tok in text.split(",") if tok.strip()]
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("expected a comma-separated list of positive numbers")
    return values


def _add_kernel_options(sub, include_tau: bool):
    sub.add_argument("--kernel", choices=KERNELS, required=True)
    sub.add_argument("--p", type=int, default=5)
    sub.add_argument("--alpha", type=float, default=0.5)
    sub.add_argument("--method", choices=("auto", "gram", "variance"), default="auto",
                     help="evaluation route for the ar kernel")
    sub.add_argument("--base", choices=("gaussian", "linear"), default="gaussian",
                     help="base kernel for ark")
    sub.add_argument("--sigma-sq", default="auto",
                     help="gaussian base scale, or 'auto' for the median heuristic")
    if include_tau:
        sub.add_argument("--tau", type=float, default=None,
                         help="enable the low-rank ark path with this tolerance")
        sub.add_argument("--bandwidth", type=float, default=None,
                         help="bandwidth used inside the low-rank stopping rule")


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--center", action="store_true",
                     help="subtract each series' mean observation first")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arkernel",
        description="Autoregressive time-series kernels: data generation, matrices, benchmarks.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen-toy", help="generate the synthetic VAR benchmark datasets")
    gen.add_argument("--out", required=True)
    gen.add_argument("--d", type=int, default=1000)
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--train-per-class", type=int, default=10)
    gen.add_argument("--test-per-class", type=int, default=100)
    gen.add_argument("--classes", type=int, default=2)
    gen.add_argument("--density", type=float, default=0.1)
    gen.add_argument("--noise-variance", type=float, default=0.1)
    gen.add_argument("--spectral-radius", type=float, default=0.95)
    gen.add_argument("--init-range", type=float, default=5.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(func=cmd_gen_toy)

    gram = subs.add_parser("gram", help="write a pairwise matrix for a dataset")
    gram.add_argument("--data", required=True)
    gram.add_argument("--out", required=True)
    gram.add_argument("--matrix", choices=("phi", "kernel"), default="phi",
                      help="emit raw dissimilarities or the exponentiated kernel")
    gram.add_argument("--psd-check", type=_positive_float_list, default=None,
                      help="append min/max eigenvalues of exp(-phi/t) for these t")
    _add_kernel_options(gram, include_tau=True)
    _add_common(gram)
    gram.set_defaults(func=cmd_gram)

    cls = subs.add_parser("classify", help="run the SVM benchmark with model selection")
    cls.add_argument("--train", required=True)
    cls.add_argument("--test", required=True)
    cls.add_argument("--out", required=True)
    cls.add_argument("--folds", type=int, default=5)
    _add_kernel_options(cls, include_tau=True)
    _add_common(cls)
    cls.set_defaults(func=cmd_classify)

    study = subs.add_parser("approx-study", help="tolerance sweep of the low-rank ark path")
    study.add_argument("--data", required=True)
    study.add_argument("--out", required=True)
    study.add_argument("--taus", type=_positive_float_list, default=None)
    study.add_argument("--cap", type=int, default=50)
    study.add_argument("--p", type=int, default=5)
    study.add_argument("--alpha", type=float, default=0.5)
    study.add_argument("--sigma-sq", default="auto")
    study.add_argument("--bandwidth", type=float, default=None,
                       help="fixed bandwidth; default is the dense matrix median")
    _add_common(study)
    study.set_defaults(func=cmd_approx_study)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArKernelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
