"""Curvature pinching and P-membership certificates for metrics on S^6."""

import json

from ._occert import (
    ChartPoint,
    Metric,
    OccertError,
    __version__,
    chart_metric,
    chart_point_from_ambient,
    check_bhl,
    certify_p_sufficient,
    cross7,
    curvature_spectrum,
    g2_structure,
    kulkarni_nomizu_square,
    refute_p,
    riemann,
    run_json,
    sample_points,
)


def _config(command, metric, points, seed, fd_step, richardson, multistarts, tol, checks):
    if isinstance(metric, Metric):
        metric = json.loads(metric.to_json())
    elif isinstance(metric, str):
        metric = {"family": metric}
    cfg = {
        "command": command,
        "metric": metric,
        "points": points,
        "seed": seed,
        "fd": {"h": fd_step, "scheme": "richardson_4th" if richardson else "central_2nd"},
        "multistarts": multistarts,
        "tol": tol,
    }
    if checks is not None:
        cfg["checks"] = list(checks)
    return cfg


def certify(metric="round", points=20, seed=0, fd_step=1e-3, richardson=False,
            multistarts=64, tol=1e-9, checks=None):
    """Run the certification batch and return the report as a dict."""
    cfg = _config("certify", metric, points, seed, fd_step, richardson, multistarts, tol, checks)
    return json.loads(run_json(json.dumps(cfg)))


def spectrum(metric="round", points=20, seed=0, fd_step=1e-3, richardson=False):
    """Curvature-operator spectra at sampled points, as a report dict."""
    cfg = _config("spectrum", metric, points, seed, fd_step, richardson, 64, 1e-9, None)
    return json.loads(run_json(json.dumps(cfg)))


__all__ = [
    "ChartPoint", "Metric", "OccertError", "__version__", "certify", "certify_p_sufficient",
    "chart_metric", "chart_point_from_ambient", "check_bhl", "cross7", "curvature_spectrum",
    "g2_structure", "kulkarni_nomizu_square", "refute_p", "riemann", "run_json", "sample_points",
    "spectrum",
]
