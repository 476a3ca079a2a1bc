"""Command-line harness: reproducible experiments with CSV/JSON outputs.

    ht constants|svd-report|figure1|figure2|reconstruct|bounds|validate
       [--config FILE] [--out DIR] [--seed N] [--small]

Every command is deterministic given the config and seed; reruns produce
byte-identical files.  Exit codes: 0 success, 2 configuration error,
3 numerical failure.  The environment variable HT_THREADS caps the thread
count of the underlying linear-algebra libraries.
"""

import argparse
import os
import sys


def _apply_thread_cap():
    cap = os.environ.get("HT_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _build_parser():
    p = argparse.ArgumentParser(prog="ht", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, desc in (
            ("constants", "interval constants and Hoelder exponents"),
            ("svd-report", "spectrum, decay fits, counts, monotonicity"),
            ("figure1", "Hoelder exponent sweep over the overlap size"),
            ("figure2", "tail decay and ROI-norm data with model overlays"),
            ("reconstruct", "regularized inversions against noise sweeps"),
            ("bounds", "stability bound sweep"),
            ("validate", "check a configuration file and exit")):
        q = sub.add_parser(name, help=desc)
        q.add_argument("--config", default=None, help="JSON config file")
        q.add_argument("--out", default=None, help="output directory")
        q.add_argument("--seed", type=int, default=None, help="noise seed override")
        q.add_argument("--small", action="store_true",
                       help="fast preset on the 1/15-scale geometry")
    return p


def main(argv=None) -> int:
    _apply_thread_cap()
    args = _build_parser().parse_args(argv)

    from .errors import ConfigError, TruncatedHilbertError
    from .config import load_config

    try:
        cfg = load_config(args.config, small=args.small,
                          overrides={"seed": args.seed, "output_dir": args.out})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        outdir = _prepare_outdir(cfg)
        runner = {
            "constants": _cmd_constants,
            "svd-report": _cmd_svd_report,
            "figure1": _cmd_figure1,
            "figure2": _cmd_figure2,
            "reconstruct": _cmd_reconstruct,
            "bounds": _cmd_bounds,
            "validate": _cmd_validate,
        }[args.command]
        runner(cfg, outdir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TruncatedHilbertError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


def _prepare_outdir(cfg):
    os.makedirs(cfg.output_dir, exist_ok=True)
    return cfg.output_dir


def _fmt(x) -> str:
    return f"{x:.17e}"


def _cmd_validate(cfg, outdir) -> None:
    print(f"config OK: geometry={cfg.geometry} step={cfg.step} shift={cfg.shift} "
          f"mu_list={cfg.mu_list} output_dir={cfg.output_dir}")


def _cmd_constants(cfg, outdir) -> None:
    import csv

    from . import geometry as geo

    geom = cfg.geom()
    km = geo.k_minus(geom)
    kp = geo.k_plus(geom)
    a = geo.alpha(geom)
    path = os.path.join(outdir, "constants.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mu", "k_minus", "k_plus", "alpha", "beta_mu_exact",
                    "beta_mu_approx", "holder_exponent"])
        for mu in cfg.mu_list:
            be = geo.beta_mu_exact(geom, mu)
            ba = geo.beta_mu_approx(geom, mu)
            w.writerow([_fmt(mu), _fmt(km), _fmt(kp), _fmt(a), _fmt(be),
                        _fmt(ba), _fmt(be / a)])
    print(f"K- = {km:.12e}   K+ = {kp:.12e}   alpha = {a:.12e}")
    for mu in cfg.mu_list:
        be = geo.beta_mu_exact(geom, mu)
        print(f"mu = {mu:g}: beta = {be:.12e}   beta/alpha = {be / a:.6f}")
    print(f"wrote {path}")


def _spectral_setup(cfg):
    from .operator import build_operator
    from .spectral import compute_svd

    op = build_operator(cfg.geom(), step=cfg.step, shift=cfg.shift)
    sys_ = compute_svd(op, rank_tol=cfg.rank_tol, method=cfg.svd_method)
    return op, sys_


def _cmd_svd_report(cfg, outdir) -> None:
    import json

    from . import geometry as geo
    from .errors import SpectralError
    from .spectral import (check_monotone, export_spectrum_csv, fit_roi_decay,
                           fit_tail_decay, near_one_tail_fit, sigma_counts,
                           tail_index_map, DEFAULT_TAIL_LEN)

    geom = cfg.geom()
    op, sys_ = _spectral_setup(cfg)
    if sys_.count == 0:
        raise SpectralError("spectrum is empty after rank truncation")
    tail_len = min(DEFAULT_TAIL_LEN, sys_.count)
    below_097, below_001 = sigma_counts(sys_)
    tail_fit = fit_tail_decay(sys_, tail_len)
    a = geo.alpha(geom)
    summary = {
        "matrix_shape": list(op.shape),
        "sigma_max": sys_.sigmas[0],
        "retained": sys_.count,
        "count_below_0.97": below_097,
        "count_below_0.01": below_001,
        "tail_fit": {"rate": tail_fit.rate, "amplitude": tail_fit.amplitude,
                     "residual": tail_fit.residual},
        "alpha": a,
        "tail_rate_rel_dev": abs(tail_fit.rate - a) / a,
        "roi_fits": {},
        "monotone_tail": [],
    }
    for mu in cfg.mu_list:
        rf = fit_roi_decay(sys_, mu, tail_len)
        beta = geo.beta_mu_exact(geom, mu)
        summary["roi_fits"][f"{mu:g}"] = {
            "rate": rf.rate, "beta_mu": beta,
            "rel_dev": abs(rf.rate - beta) / beta,
        }
    try:
        nf = near_one_tail_fit(sys_, head_len=5)
        summary["near_one_fit"] = {"rate": nf.rate, "amplitude": nf.amplitude}
        summary["near_one_rate_expected"] = geo.near_one_rate(geom)
    except Exception as exc:   # small systems may lack the near-one branch
        summary["near_one_fit"] = {"error": str(exc)}
    for n, k in tail_index_map(sys_, tail_len):
        summary["monotone_tail"].append(
            {"n": n, "monotone": check_monotone(sys_, k)})
    head_index = max(0, sys_.count - DEFAULT_TAIL_LEN - 20)
    summary["head_vector_monotone"] = check_monotone(sys_, head_index)

    spec_path = os.path.join(outdir, "spectrum.csv")
    export_spectrum_csv(sys_, spec_path, cfg.mu_list, tail_len)
    sum_path = os.path.join(outdir, "svd_summary.json")
    with open(sum_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    print(f"sigma_max = {sys_.sigmas[0]:.12f}; retained = {sys_.count}")
    print(f"count < 0.97: {below_097}; count < 0.01: {below_001}")
    print(f"tail rate {tail_fit.rate:.4f} vs alpha {a:.4f} "
          f"({summary['tail_rate_rel_dev']:.2%})")
    print(f"wrote {spec_path} and {sum_path}")


def _cmd_figure1(cfg, outdir) -> None:
    import csv

    import numpy as np

    from . import geometry as geo
    from .errors import QuadratureError

    fractions = (0.25, 0.10, 0.01)
    path = os.path.join(outdir, "figure1.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a3", "mu_fraction", "mu", "holder_exponent", "status"])
        for a3 in np.round(np.linspace(0.05, 0.95, 19), 10):
            geom = geo.Geometry(-1.0, 0.0, float(a3), 1.0)
            for frac in fractions:
                mu = frac * a3
                try:
                    h = geo.holder_exponent(geom, mu)
                    w.writerow([_fmt(a3), f"{frac:g}", _fmt(mu), _fmt(h), "ok"])
                except QuadratureError as exc:
                    w.writerow([_fmt(a3), f"{frac:g}", _fmt(mu), "",
                                f"quadrature_error: {exc}"])
    print(f"wrote {path}")


def _cmd_figure2(cfg, outdir) -> None:
    import csv

    import numpy as np

    from . import geometry as geo
    from .spectral import roi_norm, tail_index_map, DEFAULT_TAIL_LEN

    geom = cfg.geom()
    op, sys_ = _spectral_setup(cfg)
    tail_len = min(DEFAULT_TAIL_LEN, sys_.count)
    pairs = tail_index_map(sys_, tail_len)
    a = geo.alpha(geom)

    sig_path = os.path.join(outdir, "figure2_sigma.csv")
    with open(sig_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "log_sigma", "log_model"])
        for n, k in pairs:
            w.writerow([n, _fmt(np.log(sys_.sigmas[k])),
                        _fmt(np.log(2.0) - a * n)])

    roi_path = os.path.join(outdir, "figure2_roi.csv")
    betas = {mu: geo.beta_mu_exact(geom, mu) for mu in cfg.mu_list}
    with open(roi_path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["n"]
        for mu in cfg.mu_list:
            header += [f"log_roi_mu{mu:g}", f"log_model_mu{mu:g}"]
        w.writerow(header)
        for n, k in pairs:
            row = [n]
            for mu in cfg.mu_list:
                rn = roi_norm(sys_, k, mu)
                model = -betas[mu] * n - 0.5 * np.log(n * np.pi)
                row += [_fmt(np.log(rn)), _fmt(model)]
            w.writerow(row)
    print(f"wrote {sig_path} and {roi_path}")


def _default_phantom(cfg):
    geom = cfg.geom()
    width = 0.2 * (geom.a4 - geom.a2)
    center = 0.5 * (geom.a2 + geom.a3)
    return {"kind": "bump", "center": center, "width": width, "amplitude": 1.0}


def _cmd_reconstruct(cfg, outdir) -> None:
    import csv

    from .bounds import calibrate_constants, l2_validity, roi_bound_l2
    from .errors import ConfigError
    from .operator import apply_forward, weighted_norm
    from .regularization import (add_noise, export_reconstruction, make_phantom,
                                 optimal_cutoff_l2, tikhonov_reconstruct,
                                 tsvd_reconstruct)
    from .spectral import roi_mask

    geom = cfg.geom()
    op, sys_ = _spectral_setup(cfg)
    phantom_spec = cfg.phantom or _default_phantom(cfg)
    kind = phantom_spec["kind"]
    params = {k: v for k, v in phantom_spec.items() if k != "kind"}
    f_true = make_phantom(kind, geom, op.object_grid, **params)
    norm_true = weighted_norm(f_true, op.step)
    if norm_true > cfg.E:
        raise ConfigError(f"phantom norm {norm_true:.6g} exceeds the prior bound "
                          f"E={cfg.E}; raise E or shrink the phantom")
    g_ex = apply_forward(op, f_true)
    mu = float(cfg.mu_list[0])
    consts = calibrate_constants(sys_, geom, mu, c_tv=cfg.c_tv, amplitude=cfg.A)
    mask = roi_mask(geom, op.object_grid, mu)

    summary_path = os.path.join(outdir, "reconstruction_summary.csv")
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["delta", "method", "cutoff_n", "eta", "roi_error",
                    "bound", "bound_valid"])
        for delta in cfg.delta_list:
            delta = float(delta)
            noisy = add_noise(g_ex, delta, cfg.seed, step=op.step)
            cut = optimal_cutoff_l2(delta, cfg.E, consts)
            eta = delta ** 2 / cfg.E ** 2
            runs = [
                ("tsvd", tsvd_reconstruct(sys_, noisy.g, cut.n_cut)),
                ("tikhonov", tikhonov_reconstruct(sys_, noisy.g, eta)),
            ]
            for method, rec in runs:
                err = weighted_norm((rec.f - f_true)[mask], op.step)
                valid = l2_validity(delta, cfg.E, consts)
                bound = (roi_bound_l2(delta, cfg.E, consts, method)
                         if valid else float("nan"))
                w.writerow([
                    _fmt(delta), method,
                    str(cut.n_cut) if method == "tsvd" else "",
                    _fmt(eta) if method == "tikhonov" else "",
                    _fmt(err), _fmt(bound) if valid else "nan",
                    str(valid).lower(),
                ])
                run_path = os.path.join(
                    outdir, f"recon_{method}_delta{delta:.0e}.csv")
                export_reconstruction(run_path, op.object_grid, f_true, rec.f, {
                    "method": method, "delta": delta, "E": cfg.E,
                    "mu": mu, "seed": cfg.seed,
                    "cutoff_n": cut.n_cut if method == "tsvd" else None,
                    "eta": eta if method == "tikhonov" else None,
                    "roi_error": err,
                    "bound": None if not valid else bound,
                    "bound_valid": valid,
                })
    print(f"wrote {summary_path}")


def _cmd_bounds(cfg, outdir) -> None:
    from .bounds import calibrate_constants, write_bounds_csv

    geom = cfg.geom()
    op, sys_ = _spectral_setup(cfg)
    mu = float(cfg.mu_list[0])
    consts = calibrate_constants(sys_, geom, mu, c_tv=cfg.c_tv, amplitude=cfg.A)
    path = os.path.join(outdir, "bounds.csv")
    write_bounds_csv(path, [float(d) for d in cfg.delta_list], consts,
                     E=cfg.E, kappa=cfg.kappa)
    print(f"calibrated: A={consts.A:.6f} N0={consts.n0} N_mu={consts.n_mu} "
          f"beta_mu={consts.beta_mu:.6f} V_mu={consts.v_mu:.6f}")
    print(f"wrote {path}")


if __name__ == "__main__":
    sys.exit(main())
