"""The detection algorithms: block-wise screening plus split refinement.

Six entry points share the same skeleton: flag candidate boundaries
(chi-square tests on block-OLS jumps, or the active groups of a penalized
fit screened by scalar SCAD thresholding, with optional CUSUM decisions),
then refine each flagged boundary by an exhaustive split-RSS search in a
one-block-radius window.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
from numpy.typing import NDArray

from .cusum import MIN_THRESHOLD_WINDOW, CusumWindow, cusum_test, refine_changepoint
from .design import SegmentedDesign
from .model import Dataset, DetectionResult, Segmentation, make_segmentation
from .ols import (
    DeltaEstimates,
    chi2_quantile,
    delta_test_pair,
    delta_test_single,
    estimate_deltas,
    noise_variance,
    segment_ols,
)
from .penalties import scad_threshold_scalar
from .solver import (
    PenaltySpec,
    default_lambda_grid,
    select_lambda_bic,
    solve_group_penalized,
)

__all__ = [
    "DetectorConfig",
    "BoundaryScreen",
    "ALGORITHM_NAMES",
    "detect",
    "detect_lsmcpda",
    "detect_clsmcpda",
    "detect_almcpda",
    "detect_calmcpda",
    "detect_penalized",
    "select_pn",
    "piecewise_rss",
]


@dataclass(frozen=True)
class DetectorConfig:
    """Shared tuning knobs for every detector."""

    alpha: float = 0.05
    p_n: int | str = "auto"
    c: float = 1.0
    nu: float = 1.0
    gamma_scad: float = 3.7
    gamma_mcp: float = 2.4
    step3_lambda: float = 0.02
    step3_gamma: float = 3.7
    wald_normalization: bool = False
    # the "verbatim" single-test branch advances without flagging when
    # significant; "inverted" flags instead, which calibrates better on
    # sequences with many changes (see the calibration note in README)
    step2_logic: str = "inverted"
    # after confirming a screened boundary, "adjacent" skips the next
    # selected index only when it is the neighboring boundary (a duplicate
    # carrier of the same change); "printed" always skips it
    step4_skip: str = "adjacent"
    # BIC scores the refit (post-selection OLS) or the penalized-fit RSS
    bic_rss: str = "refit"
    stages: str = "full"  # "screen-only" stops after the screening step
    lambda_grid_size: int = 50
    cd_tol: float = 1e-6
    cd_max_sweeps: int = 40_000

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.c <= 0 or self.nu <= 0:
            raise ValueError("c and nu must be positive")
        if self.step2_logic not in ("verbatim", "inverted"):
            raise ValueError("step2_logic must be 'verbatim' or 'inverted'")
        if self.step4_skip not in ("adjacent", "printed"):
            raise ValueError("step4_skip must be 'adjacent' or 'printed'")
        if self.bic_rss not in ("refit", "penalized"):
            raise ValueError("bic_rss must be 'refit' or 'penalized'")
        if self.stages not in ("full", "screen-only"):
            raise ValueError("stages must be 'full' or 'screen-only'")

    def resolve_pn(self, n: int) -> int:
        if self.p_n == "auto":
            return max(n // 50, 1)
        return int(self.p_n)


@dataclass(frozen=True)
class BoundaryScreen:
    """Outcome of scalar SCAD screening of penalized group magnitudes."""

    z: NDArray[np.float64]
    mu_tilde: NDArray[np.float64]
    selected: tuple[int, ...]  # 1-based boundary indices, ascending


def _screen(z: np.ndarray, lam: float, gamma: float) -> BoundaryScreen:
    mu = np.array([scad_threshold_scalar(v, lam, gamma) for v in z])
    selected = tuple(int(i) + 1 for i in np.nonzero(mu)[0])
    return BoundaryScreen(z=z, mu_tilde=mu, selected=selected)


def piecewise_rss(data: Dataset, locations: tuple[int, ...]) -> float:
    """RSS of an unpenalized per-regime OLS refit."""
    cuts = [0, *locations, data.n]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi > lo:
            total += segment_ols(data, (lo + 1, hi)).rss
    return total


def _refine_one(
    data: Dataset,
    seg: Segmentation,
    boundary: int,
    diagnostics: dict,
    window: tuple[int, int] | None = None,
) -> int:
    if window is None:
        window = (boundary - seg.m, boundary + seg.m)
    lo = max(window[0], 1)
    hi = min(window[1], data.n)
    if hi - lo + 1 < 2 * (data.q + 1):
        diagnostics.setdefault("unrefined_boundaries", []).append(boundary)
        return min(max(boundary, 2), data.n - 1)
    return refine_changepoint(data, (lo, hi))


def _merge_close(
    data: Dataset, seg: Segmentation, locations: list[int], diagnostics: dict
) -> list[int]:
    """Drop the worse of any two refined locations closer than m."""
    locs = sorted(set(locations))
    changed = True
    while changed and len(locs) > 1:
        changed = False
        for a, b in zip(locs[:-1], locs[1:]):
            if b - a < seg.m:
                lo = max(a - seg.m, 1)
                hi = min(b + seg.m, data.n)
                rss_a = _split_rss_at(data, (lo, hi), a)
                rss_b = _split_rss_at(data, (lo, hi), b)
                drop = b if rss_a <= rss_b else a
                locs.remove(drop)
                diagnostics.setdefault("merged_locations", []).append(drop)
                changed = True
                break
    return locs


def _split_rss_at(data: Dataset, window: tuple[int, int], split: int) -> float:
    lo, hi = window
    if not (lo <= split < hi):
        return math.inf
    left = segment_ols(data, (lo, split)).rss if split >= lo else math.inf
    right = segment_ols(data, (split + 1, hi)).rss
    return left + right


def _assemble(
    data: Dataset,
    seg: Segmentation,
    algorithm: str,
    hits: list[int],
    t0: float,
    diagnostics: dict,
    refine: bool = True,
    windows: list[tuple[int, int] | None] | None = None,
) -> DetectionResult:
    if refine:
        if windows is None:
            windows = [None] * len(hits)
        refined = [
            _refine_one(data, seg, b, diagnostics, window=w)
            for b, w in zip(hits, windows)
        ]
        locations = _merge_close(data, seg, refined, diagnostics)
    else:
        locations = sorted(set(hits))
    locations = [a for a in locations if 1 < a < data.n]
    loc_t = tuple(locations)
    return DetectionResult(
        algorithm=algorithm,
        k_hat=len(loc_t),
        locations=loc_t,
        boundary_hits=tuple(hits),
        rss=piecewise_rss(data, loc_t),
        runtime=time.perf_counter() - t0,
        diagnostics=diagnostics,
    )


def _boundary_position(seg: Segmentation, i: int) -> int:
    """Absolute index n - p_n m + i m (the flag position used by the scan)."""
    return seg.n - seg.p_n * seg.m + i * seg.m


def _cusum_or_fallback(
    data: Dataset,
    window: tuple[int, int],
    alpha: float,
    fallback: tuple[float, bool],
    diagnostics: dict,
) -> bool:
    """CUSUM decision on a clipped window, chi-square fallback when short."""
    lo = max(window[0], 1)
    hi = min(window[1], data.n)
    if hi - lo + 1 <= max(MIN_THRESHOLD_WINDOW, 2 * data.q + 1):
        diagnostics.setdefault("cusum_fallbacks", []).append((lo, hi))
        return fallback[1]
    return cusum_test(data, CusumWindow(lo, hi), alpha).reject


def _step2_scan(
    data: Dataset,
    seg: Segmentation,
    de: DeltaEstimates,
    config: DetectorConfig,
    diagnostics: dict,
    use_cusum: bool,
) -> list[int]:
    """Boundary scan shared by the least-squares detectors.

    Tests each boundary jump, then the telescoped sum of the next two, and
    flags n - p_n m + i m on a pair rejection. The printed branching
    ("verbatim") advances without flagging when the single test rejects;
    "inverted" treats a single-test rejection as a flag.
    """
    sigma2 = de.sigma2_hat
    p_n = seg.p_n
    hits: list[int] = []
    i = 1
    while i < p_n - 3:
        if de.fits[i - 1].rank_deficient or de.fits[i].rank_deficient:
            diagnostics.setdefault("unresolvable_boundaries", []).append(i)
            i += 1
            continue
        stat1, sig1 = delta_test_single(
            de.d_hat[i - 1],
            de.grams[i],
            sigma2,
            config.alpha,
            wald_normalization=config.wald_normalization,
        )
        if use_cusum:
            w_single = (seg.blocks[i - 1][0], seg.blocks[i][1])
            sig1 = _cusum_or_fallback(
                data, w_single, config.alpha, (stat1, sig1), diagnostics
            )
        if sig1:
            if config.step2_logic == "inverted":
                hits.append(_boundary_position(seg, i))
                i += 2
            else:
                i += 1
            continue
        d_pair = de.d_hat[i] + de.d_hat[i + 1]
        stat2, sig2 = delta_test_pair(
            d_pair,
            de.grams[i],
            sigma2,
            config.alpha,
            wald_normalization=config.wald_normalization,
        )
        if use_cusum:
            w_pair = (seg.blocks[i][0], seg.blocks[i + 2][1])
            sig2 = _cusum_or_fallback(
                data, w_pair, config.alpha, (stat2, sig2), diagnostics
            )
        if sig2:
            hits.append(_boundary_position(seg, i))
            i += 2
        else:
            i += 1
    return hits


def detect_lsmcpda(data: Dataset, config: DetectorConfig) -> DetectionResult:
    """Least-squares scan over boundary jumps with split refinement."""
    t0 = time.perf_counter()
    seg = make_segmentation(data.n, config.resolve_pn(data.n), data.q)
    de = estimate_deltas(data, seg)
    diagnostics: dict[str, Any] = {}
    hits = _step2_scan(data, seg, de, config, diagnostics, use_cusum=False)
    return _assemble(data, seg, "lsmcpda", hits, t0, diagnostics)


def detect_clsmcpda(data: Dataset, config: DetectorConfig) -> DetectionResult:
    """The least-squares scan with CUSUM decisions, then screened re-tests.

    The scan's flagged boundaries go through the same screen-and-confirm
    stage as the penalized detectors: block jumps at unflagged boundaries
    are masked out, the rest are thresholded and re-tested by per-boundary
    CUSUM before refinement.
    """
    t0 = time.perf_counter()
    seg = make_segmentation(data.n, config.resolve_pn(data.n), data.q)
    de = estimate_deltas(data, seg)
    diagnostics: dict[str, Any] = {}
    scan_hits = _step2_scan(data, seg, de, config, diagnostics, use_cusum=True)
    diagnostics["scan_hits"] = list(scan_hits)
    offset = data.n - seg.p_n * seg.m
    # a flag at index i came from the jump at i or the pair at i+1, i+2
    flagged = sorted(
        {
            r
            for b in scan_hits
            for r in ((b - offset) // seg.m + k for k in (0, 1, 2))
            if 1 <= r <= seg.p_n
        }
    )
    d_groups = np.zeros_like(de.d_hat)
    for r in flagged:
        d_groups[r - 1] = de.d_hat[r - 1]
    hits, _ = _screened_scan(
        data, seg, d_groups, de.grams, de.sigma2_hat, config, diagnostics, use_cusum=True
    )
    return _assemble(data, seg, "clsmcpda", hits, t0, diagnostics)


def _adaptive_weights(
    seg: Segmentation,
    config: DetectorConfig,
    ls_locations: tuple[int, ...],
    q: int,
    d_hat: np.ndarray | None = None,
) -> np.ndarray:
    """Initial-estimate weights: flagged boundaries get constant magnitude c,
    everything else magnitude 1/sqrt(m) per coordinate; with block-OLS
    deltas available, each boundary also gets the generic adaptive weight
    1/|d_hat|_1^nu and the lighter of the two applies, so a true change the
    scan missed still enters the fit cheaply."""
    w = np.full(seg.p_n + 1, (math.sqrt(seg.m) / q) ** config.nu)
    w[0] = 1.0 / q**config.nu
    for a in ls_locations:
        # carrier group of the flagged location: the group whose activation
        # row is nearest to it, i.e. the group a sparse fit would use
        t = a - (seg.n - seg.p_n * seg.m)
        r = min(max(round(t / seg.m) + 1, 1), seg.p_n)
        w[r] = 1.0 / (config.c * q) ** config.nu
    if d_hat is not None:
        mags = np.abs(d_hat).sum(axis=1)
        with np.errstate(divide="ignore"):
            w[1:] = np.minimum(w[1:], np.where(mags > 0, mags, np.inf) ** -config.nu)
    return w


def _screened_scan(
    data: Dataset,
    seg: Segmentation,
    d_groups: np.ndarray,
    grams,
    sigma2: float,
    config: DetectorConfig,
    diagnostics: dict,
    use_cusum: bool,
    widen: bool = False,
    raw_deltas: np.ndarray | None = None,
) -> tuple[list[int], list[tuple[int, int] | None]]:
    """Steps 3-4 shared by the penalized detectors.

    Screens group sup-norms by scalar SCAD thresholding, then confirms the
    selected boundaries. Near-adjacent selections (gap <= 2) are duplicate
    carriers of one change — a sparse fit can split a jump across neighbor
    groups — so each such cluster gets a single test over its combined
    window. With "printed" skipping, the scan instead walks the selected
    indices one by one and a confirmation skips the next index.
    """
    z = np.abs(d_groups).max(axis=1)
    screen = _screen(z, config.step3_lambda, config.step3_gamma)
    diagnostics["screen_selected"] = list(screen.selected)
    hits: list[int] = []
    spans: list[tuple[int, int] | None] = []
    if not screen.selected:
        return hits, spans
    q = data.q
    p_n = seg.p_n

    if config.step4_skip == "printed":
        idx = 0
        while idx < len(screen.selected):
            s = screen.selected[idx]
            d_s = d_groups[s - 1]
            stat = float((p_n - s) * (d_s @ (grams[s] @ d_s)) / (q * sigma2))
            sig = stat >= chi2_quantile(config.alpha, q)
            if use_cusum:
                b = _boundary_position(seg, s - 1)
                sig = _cusum_or_fallback(
                    data,
                    (b - seg.m + 1, b + seg.m),
                    config.alpha,
                    (stat, sig),
                    diagnostics,
                )
            if sig:
                hits.append(_boundary_position(seg, s - 1))
                idx += 2
            else:
                idx += 1
        return hits, [None] * len(hits)

    clusters: list[list[int]] = [[screen.selected[0]]]
    for s in screen.selected[1:]:
        if s - clusters[-1][-1] <= 2:
            clusters[-1].append(s)
        else:
            clusters.append([s])
    offset = data.n - p_n * seg.m
    for cluster in clusters:
        rep = max(cluster, key=lambda s: z[s - 1])
        # a jump split across neighbor groups telescopes back to the full
        # jump, so the cluster is tested on the summed coefficient
        d_s = d_groups[[s - 1 for s in cluster]].sum(axis=0)
        stat = float((p_n - rep) * (d_s @ (grams[rep] @ d_s)) / (q * sigma2))
        sig = stat >= chi2_quantile(config.alpha, q)
        b = _boundary_position(seg, rep - 1)
        if sig and not use_cusum and raw_deltas is not None:
            # corroborate against the raw block-difference estimates, which
            # predate the penalized fit and so carry no selection bias: the
            # telescoped sum over the cluster and its immediate neighbours
            # estimates the total jump even when the carrier is off by one
            d_raw = raw_deltas[max(cluster[0] - 2, 0) : cluster[-1] + 1].sum(axis=0)
            _, raw_ok = delta_test_single(
                d_raw,
                grams[cluster[-1]],
                sigma2,
                config.alpha,
                wald_normalization=True,
            )
            sig = raw_ok
        if use_cusum:
            lo = max(_boundary_position(seg, cluster[0] - 1) - seg.m + 1, 1)
            hi = min(_boundary_position(seg, cluster[-1] - 1) + seg.m, data.n)
            if widen:
                # widen by a block on each side: the selected carrier can be
                # off by one, which would leave the change at the window
                # edge where the statistic has no power
                lo = max(lo - seg.m, 1)
                hi = min(hi + seg.m, data.n)
            if hi - lo + 1 <= max(MIN_THRESHOLD_WINDOW, 2 * data.q + 1):
                diagnostics.setdefault("cusum_fallbacks", []).append((lo, hi))
            else:
                out = cusum_test(data, CusumWindow(lo, hi), config.alpha)
                # both the coefficient test and the window CUSUM must agree,
                # which suppresses spurious clusters without costing power
                sig = sig and out.reject
                if sig:
                    # snap to the flag position nearest the estimated split
                    # so the refinement window is centered on the change
                    i = round((out.k_hat - offset) / seg.m)
                    b = _boundary_position(seg, min(max(i, 1), p_n - 1))
        if sig:
            hits.append(b)
            if use_cusum:
                spans.append(None)
            else:
                # refine over the whole carrier span: the representative can
                # sit at the far end of a multi-group cluster, leaving the
                # change outside a window centred on it alone
                spans.append(
                    (
                        _boundary_position(seg, cluster[0] - 1) - 2 * seg.m,
                        _boundary_position(seg, cluster[-1] - 1) + 2 * seg.m,
                    )
                )
    return hits, spans


def _detect_adaptive(
    data: Dataset, config: DetectorConfig, use_cusum: bool
) -> DetectionResult:
    name = "calmcpda" if use_cusum else "almcpda"
    t0 = time.perf_counter()
    seg = make_segmentation(data.n, config.resolve_pn(data.n), data.q)
    de = estimate_deltas(data, seg)
    diagnostics: dict[str, Any] = {}

    ls_result = detect_lsmcpda(data, config)
    weights = _adaptive_weights(
        seg, config, ls_result.locations, data.q, d_hat=de.d_hat
    )
    design = SegmentedDesign.build(data, seg)
    grid = default_lambda_grid(design, weights, num=config.lambda_grid_size)
    lam, rep = select_lambda_bic(
        design,
        grid,
        nu=config.nu,
        weights=weights,
        tol=config.cd_tol,
        max_sweeps=config.cd_max_sweeps,
        rss_mode=config.bic_rss,
    )
    diagnostics["lambda"] = lam
    d_groups = rep.theta_hat.reshape(seg.p_n + 1, data.q)[1:]

    if config.stages == "screen-only":
        screen = _screen(
            np.abs(d_groups).max(axis=1), config.step3_lambda, config.step3_gamma
        )
        hits = [_boundary_position(seg, s - 1) for s in screen.selected]
        diagnostics["screen_selected"] = list(screen.selected)
        return _assemble(data, seg, name, hits, t0, diagnostics, refine=False)

    hits, spans = _screened_scan(
        data,
        seg,
        d_groups,
        de.grams,
        de.sigma2_hat,
        config,
        diagnostics,
        use_cusum,
        widen=use_cusum,
        raw_deltas=de.d_hat,
    )
    return _assemble(data, seg, name, hits, t0, diagnostics, windows=spans)


def detect_almcpda(data: Dataset, config: DetectorConfig) -> DetectionResult:
    """Adaptive-LASSO detection with chi-square boundary confirmation."""
    return _detect_adaptive(data, config, use_cusum=False)


def detect_calmcpda(data: Dataset, config: DetectorConfig) -> DetectionResult:
    """Adaptive-LASSO detection with CUSUM boundary confirmation."""
    return _detect_adaptive(data, config, use_cusum=True)


def detect_penalized(
    data: Dataset, config: DetectorConfig, penalty: str
) -> DetectionResult:
    """SCAD or MCP group-penalized detection with CUSUM confirmation."""
    if penalty not in ("scad", "mcp"):
        raise ValueError("penalty must be 'scad' or 'mcp'")
    t0 = time.perf_counter()
    seg = make_segmentation(data.n, config.resolve_pn(data.n), data.q)
    sigma2 = noise_variance(data, seg)
    diagnostics: dict[str, Any] = {}

    lam = math.sqrt(sigma2) * math.sqrt(2.0 * math.log(seg.p_n) / data.n)
    gamma = config.gamma_scad if penalty == "scad" else config.gamma_mcp
    design = SegmentedDesign.build(data, seg)
    rep = solve_group_penalized(
        design,
        PenaltySpec(kind=penalty, lam=lam, gamma=gamma),
        tol=config.cd_tol,
        max_sweeps=config.cd_max_sweeps,
    )
    diagnostics["lambda"] = lam
    d_groups = rep.theta_hat.reshape(seg.p_n + 1, data.q)[1:]

    name = "smcpda" if penalty == "scad" else "mmcpda"
    if config.stages == "screen-only":
        screen = _screen(
            np.abs(d_groups).max(axis=1), config.step3_lambda, config.step3_gamma
        )
        hits = [_boundary_position(seg, s - 1) for s in screen.selected]
        diagnostics["screen_selected"] = list(screen.selected)
        return _assemble(data, seg, name, hits, t0, diagnostics, refine=False)

    de = estimate_deltas(data, seg)
    hits, _ = _screened_scan(
        data, seg, d_groups, de.grams, sigma2, config, diagnostics, use_cusum=True
    )
    return _assemble(data, seg, name, hits, t0, diagnostics)


ALGORITHM_NAMES = ("ls", "cls", "al", "cal", "scad", "mcp")


def detect(data: Dataset, config: DetectorConfig, algorithm: str) -> DetectionResult:
    """Dispatch by short algorithm name (ls, cls, al, cal, scad, mcp)."""
    if algorithm == "ls":
        return detect_lsmcpda(data, config)
    if algorithm == "cls":
        return detect_clsmcpda(data, config)
    if algorithm == "al":
        return detect_almcpda(data, config)
    if algorithm == "cal":
        return detect_calmcpda(data, config)
    if algorithm in ("scad", "mcp"):
        return detect_penalized(data, config, algorithm)
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHM_NAMES}")


def select_pn(
    data: Dataset,
    candidates: list[int],
    config: DetectorConfig,
    algorithm: str = "al",
) -> tuple[int, list[tuple[int, float]]]:
    """Pick the boundary count minimizing post-detection piecewise RSS.

    Infeasible candidates are skipped; ties break toward the smallest
    feasible candidate.
    """
    if not candidates:
        raise ValueError("candidate set is empty")
    curve: list[tuple[int, float]] = []
    for p_n in sorted(candidates):
        try:
            make_segmentation(data.n, p_n, data.q)
        except ValueError:
            continue
        result = detect(data, replace(config, p_n=p_n), algorithm)
        curve.append((p_n, result.rss))
    if not curve:
        raise ValueError("no feasible candidate p_n")
    best = min(curve, key=lambda t: (t[1], t[0]))
    return best[0], curve
