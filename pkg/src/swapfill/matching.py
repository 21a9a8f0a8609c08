"""Patch matching on feature maps.

Every k x k x C sub-block of a feature map is one vector; each patch
overlapping the hole is assigned the boundary patch maximizing normalized
cross-correlation. Two interchangeable matchers:

* brute force: per-query direct scoring of every candidate (the oracle);
* convolutional: candidate patches become a unit-normalized filter bank
  applied to the im2col expansion of all query patches as blocked matrix
  products, then divided by the query norms.

Both accumulate in float64 and resolve near-ties (score within TIE_EPS of
the maximum) to the lowest row-major candidate index, so they return
identical assignments. BLAS is pinned to one thread inside the matchers;
parallelism comes from a worker pool over fixed query blocks merged by
block index, which keeps results byte-identical for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from threadpoolctl import threadpool_limits

from .errors import GeometryError, NoCandidatesError
from .types import FeatureMap, FeatureMask

TIE_EPS = 1e-5
ZERO_NORM_EPS = 1e-12
_QUERY_BLOCK = 256

THREADS_ENV_VAR = "SWAPFILL_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """Thread count for the convolutional matcher: explicit argument, else
    the SWAPFILL_THREADS environment variable, else all cores."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Patch:
    """A k x k x C sub-block read from a feature map, flattened to one
    vector in (channel, dy, dx) order; reads off the map are zero-padded."""

    center: tuple[int, int]
    size: int
    values: np.ndarray

    def __post_init__(self):
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"patch size must be odd and >= 1, got {self.size}")
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size % (self.size * self.size) != 0:
            raise GeometryError(
                f"patch values length {values.size} not divisible by {self.size}^2")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_map(cls, fmap: FeatureMap, center: tuple[int, int], size: int) -> "Patch":
        half = size // 2
        cy, cx = center
        block = np.zeros((fmap.channels, size, size), dtype=np.float64)
        y0, y1 = cy - half, cy + half + 1
        x0, x1 = cx - half, cx + half + 1
        sy0, sx0 = max(y0, 0), max(x0, 0)
        sy1, sx1 = min(y1, fmap.height), min(x1, fmap.width)
        if sy1 > sy0 and sx1 > sx0:
            block[:, sy0 - y0:sy1 - y0, sx0 - x0:sx1 - x0] = \
                fmap.data[:, sy0:sy1, sx0:sx1]
        return cls(center=(cy, cx), size=size, values=block.ravel())


def ncc(p: Patch, q: Patch) -> float:
    """Normalized cross-correlation <p,q> / (|p| |q|) in float64; returns 0
    when either norm is below 1e-12."""
    if p.values.shape != q.values.shape:
        raise GeometryError(
            f"patch shapes differ: {p.values.shape} vs {q.values.shape}")
    pn = np.sqrt(np.dot(p.values, p.values))
    qn = np.sqrt(np.dot(q.values, q.values))
    if pn < ZERO_NORM_EPS or qn < ZERO_NORM_EPS:
        return 0.0
    return float(np.dot(p.values, q.values) / (pn * qn))


@dataclass(frozen=True)
class MatchRecord:
    query: tuple[int, int]
    source: tuple[int, int]
    score: float


@dataclass(frozen=True)
class PatchAssignment:
    """Best boundary source for every hole-overlapping patch center."""

    records: tuple[MatchRecord, ...]
    patch_size: int
    map_dims: tuple[int, int, int]   # (C, H_f, W_f)

    def to_json_dict(self) -> dict:
        return {
            "patch_size": self.patch_size,
            "dims": list(self.map_dims),
            "records": [
                {"q": [r.query[0], r.query[1]],
                 "s": [r.source[0], r.source[1]],
                 "score": r.score}
                for r in self.records
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PatchAssignment":
        try:
            records = tuple(
                MatchRecord(query=(int(r["q"][0]), int(r["q"][1])),
                            source=(int(r["s"][0]), int(r["s"][1])),
                            score=float(r["score"]))
                for r in doc["records"]
            )
            return cls(records=records, patch_size=int(doc["patch_size"]),
                       map_dims=tuple(int(d) for d in doc["dims"]))
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise GeometryError(f"malformed assignment document: {exc}") from exc


def _require_odd(k: int) -> None:
    if k < 1 or k % 2 == 0:
        raise ValueError(f"patch size must be odd and >= 1, got {k}")


def _footprint_any(mask: np.ndarray, k: int) -> np.ndarray:
    """For every full-support top-left position, whether the k x k window
    contains any True cell. Empty when the window exceeds the grid."""
    if mask.shape[0] < k or mask.shape[1] < k:
        return np.zeros((0, 0), dtype=bool)
    return sliding_window_view(mask, (k, k)).any(axis=(2, 3))


def enumerate_query_patches(fmask: FeatureMask, k: int) -> list[tuple[int, int]]:
    """Centers with full k x k support whose footprint intersects the hole,
    in row-major order."""
    _require_odd(k)
    hit = _footprint_any(fmask.data, k)
    half = k // 2
    ys, xs = np.nonzero(hit)
    return [(int(y) + half, int(x) + half) for y, x in zip(ys, xs)]


def enumerate_candidate_patches(fmask: FeatureMask, k: int) -> list[tuple[int, int]]:
    """Centers with full k x k support whose footprint avoids the hole
    entirely, in row-major order. Raises when no candidate survives."""
    _require_odd(k)
    hit = _footprint_any(fmask.data, k)
    half = k // 2
    ys, xs = np.nonzero(~hit) if hit.size else (np.array([], int), np.array([], int))
    centers = [(int(y) + half, int(x) + half) for y, x in zip(ys, xs)]
    if not centers:
        raise NoCandidatesError(
            f"no full-support {k}x{k} patch avoids the hole on a "
            f"{fmask.height}x{fmask.width} grid")
    return centers


def _rows_by_slicing(f64: np.ndarray, centers: list[tuple[int, int]], k: int) -> np.ndarray:
    """Patch vectors extracted one slice at a time (brute-force path)."""
    half = k // 2
    d = f64.shape[0] * k * k
    rows = np.empty((len(centers), d), dtype=np.float64)
    for i, (cy, cx) in enumerate(centers):
        rows[i] = f64[:, cy - half:cy + half + 1, cx - half:cx + half + 1].ravel()
    return rows


def _rows_by_windowing(f64: np.ndarray, centers: list[tuple[int, int]], k: int) -> np.ndarray:
    """Patch vectors via the im2col expansion (convolutional path)."""
    half = k // 2
    windows = sliding_window_view(f64, (k, k), axis=(1, 2))   # (C, Hp, Wp, k, k)
    ys = np.fromiter((c[0] - half for c in centers), dtype=np.intp, count=len(centers))
    xs = np.fromiter((c[1] - half for c in centers), dtype=np.intp, count=len(centers))
    gathered = windows[:, ys, xs]                              # (C, n, k, k)
    return np.ascontiguousarray(gathered.transpose(1, 0, 2, 3)).reshape(len(centers), -1)


def _pick_with_ties(scores: np.ndarray) -> tuple[int, float]:
    """Lowest row-major candidate index whose score is within TIE_EPS of
    the maximum."""
    best = scores.max()
    idx = int(np.argmax(scores >= best - TIE_EPS))
    return idx, float(scores[idx])


def _score_brute(query_f64, cand_f64, queries, candidates, k):
    cand_rows = _rows_by_slicing(cand_f64, candidates, k)
    cand_norms = np.sqrt((cand_rows * cand_rows).sum(axis=1))
    cand_ok = cand_norms >= ZERO_NORM_EPS
    half = k // 2
    chosen = np.empty(len(queries), dtype=np.intp)
    scores_out = np.empty(len(queries), dtype=np.float64)
    for i, (cy, cx) in enumerate(queries):
        p = query_f64[:, cy - half:cy + half + 1, cx - half:cx + half + 1].ravel()
        pn = np.sqrt(np.dot(p, p))
        if pn < ZERO_NORM_EPS:
            scores = np.zeros(len(candidates))
        else:
            dots = cand_rows @ p
            with np.errstate(divide="ignore", invalid="ignore"):
                scores = np.where(cand_ok, dots / (cand_norms * pn), 0.0)
        chosen[i], scores_out[i] = _pick_with_ties(scores)
    return chosen, scores_out


def _score_conv(query_f64, cand_f64, queries, candidates, k, threads):
    cand_rows = _rows_by_windowing(cand_f64, candidates, k)
    cand_norms = np.sqrt(np.einsum("ij,ij->i", cand_rows, cand_rows))
    safe = np.where(cand_norms >= ZERO_NORM_EPS, cand_norms, 1.0)
    filter_bank = cand_rows / safe[:, None]
    filter_bank[cand_norms < ZERO_NORM_EPS] = 0.0

    q_rows = _rows_by_windowing(query_f64, queries, k)
    q_norms = np.sqrt(np.einsum("ij,ij->i", q_rows, q_rows))

    n = len(queries)
    chosen = np.empty(n, dtype=np.intp)
    scores_out = np.empty(n, dtype=np.float64)

    def run_block(start: int, stop: int) -> None:
        block_scores = q_rows[start:stop] @ filter_bank.T
        qn = q_norms[start:stop]
        safe_q = np.where(qn >= ZERO_NORM_EPS, qn, 1.0)
        scores = block_scores / safe_q[:, None]
        scores[qn < ZERO_NORM_EPS] = 0.0
        best = scores.max(axis=1)
        sel = (scores >= best[:, None] - TIE_EPS).argmax(axis=1)
        chosen[start:stop] = sel
        scores_out[start:stop] = scores[np.arange(scores.shape[0]), sel]

    bounds = [(s, min(s + _QUERY_BLOCK, n)) for s in range(0, n, _QUERY_BLOCK)]
    if threads <= 1 or len(bounds) <= 1:
        for start, stop in bounds:
            run_block(start, stop)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda b: run_block(*b), bounds))
    return chosen, scores_out


def _assemble(queries, candidates, chosen, scores, k, dims) -> PatchAssignment:
    records = tuple(
        MatchRecord(query=q, source=candidates[int(c)], score=float(s))
        for q, c, s in zip(queries, chosen, scores)
    )
    return PatchAssignment(records=records, patch_size=k, map_dims=dims)


def _check_pair(fmap: FeatureMap, fmask: FeatureMask) -> None:
    if not fmask.matches(fmap):
        raise GeometryError(
            f"feature mask {fmask.height}x{fmask.width} does not match map "
            f"{fmap.height}x{fmap.width}")


def match_brute_force(fmap: FeatureMap, fmask: FeatureMask, k: int = 3) -> PatchAssignment:
    """Exhaustive matcher: scores every (query, candidate) pair directly."""
    _check_pair(fmap, fmask)
    queries = enumerate_query_patches(fmask, k)
    candidates = enumerate_candidate_patches(fmask, k)
    f64 = fmap.data.astype(np.float64)
    with threadpool_limits(limits=1):
        chosen, scores = _score_brute(f64, f64, queries, candidates, k)
    return _assemble(queries, candidates, chosen, scores, k,
                     (fmap.channels, fmap.height, fmap.width))


def match_convolutional(fmap: FeatureMap, fmask: FeatureMask, k: int = 3,
                        threads: int | None = None) -> PatchAssignment:
    """Fast matcher: one batched inner product of the im2col query matrix
    against the normalized candidate filter bank. Returns an assignment
    identical to match_brute_force under the tie rule."""
    _check_pair(fmap, fmask)
    queries = enumerate_query_patches(fmask, k)
    candidates = enumerate_candidate_patches(fmask, k)
    f64 = fmap.data.astype(np.float64)
    with threadpool_limits(limits=1):
        chosen, scores = _score_conv(f64, f64, queries, candidates, k,
                                     resolve_threads(threads))
    return _assemble(queries, candidates, chosen, scores, k,
                     (fmap.channels, fmap.height, fmap.width))


def patch_swap(fmap: FeatureMap, assignment: PatchAssignment,
               source_map: FeatureMap | None = None) -> FeatureMap:
    """Replace each query patch with its matched source patch, averaging
    overlaps; cells covered by no query patch keep their original values.

    `source_map` is where source patches are read from (defaults to `fmap`;
    cross-map assignments pass the style map here).
    """
    src = source_map if source_map is not None else fmap
    if assignment.map_dims != (fmap.channels, fmap.height, fmap.width):
        raise GeometryError(
            f"assignment dims {assignment.map_dims} do not match map "
            f"({fmap.channels}, {fmap.height}, {fmap.width})")
    if src.channels != fmap.channels:
        raise GeometryError(
            f"source map has {src.channels} channels, target has {fmap.channels}")
    half = assignment.patch_size // 2
    k = assignment.patch_size
    acc = np.zeros(fmap.data.shape, dtype=np.float64)
    count = np.zeros((fmap.height, fmap.width), dtype=np.float64)
    src64 = src.data.astype(np.float64)
    for rec in assignment.records:
        qy, qx = rec.query
        sy, sx = rec.source
        acc[:, qy - half:qy + half + 1, qx - half:qx + half + 1] += \
            src64[:, sy - half:sy + half + 1, sx - half:sx + half + 1]
        count[qy - half:qy + half + 1, qx - half:qx + half + 1] += 1.0
    out = fmap.data.astype(np.float64)
    covered = count > 0
    out[:, covered] = acc[:, covered] / count[covered]
    return FeatureMap(data=out.astype(np.float32), stride=fmap.stride)


def cross_map_swap(content: FeatureMap, style: FeatureMap, k: int = 3,
                   matcher: str = "conv",
                   threads: int | None = None) -> tuple[FeatureMap, PatchAssignment]:
    """Match every full-support content patch against every full-support
    style patch and rebuild the content map from the matched style patches.
    Sources in the returned assignment index into the style map."""
    _require_odd(k)
    if content.channels != style.channels:
        raise GeometryError(
            f"channel mismatch: content {content.channels} vs style {style.channels}")

    empty_content = FeatureMask(data=np.zeros((content.height, content.width), bool))
    empty_style = FeatureMask(data=np.zeros((style.height, style.width), bool))
    queries = enumerate_candidate_patches(empty_content, k)   # all full-support centers
    candidates = enumerate_candidate_patches(empty_style, k)

    content64 = content.data.astype(np.float64)
    style64 = style.data.astype(np.float64)
    with threadpool_limits(limits=1):
        if matcher == "brute":
            chosen, scores = _score_brute(content64, style64, queries, candidates, k)
        else:
            chosen, scores = _score_conv(content64, style64, queries, candidates, k,
                                         resolve_threads(threads))
    assignment = _assemble(queries, candidates, chosen, scores, k,
                           (content.channels, content.height, content.width))
    swapped = patch_swap(content, assignment, source_map=style)
    return swapped, assignment
