"""Color palette quantization.

Reduces an RGB image to a small palette (256 colors by default) using one
of four interchangeable algorithms, and measures the reconstruction error
this introduces. Every method runs on the image's distinct-color
histogram, which makes all of them invariant to pixel order, and each
finishes with a nearest-color reassignment pass, so the palette invariant
(each pixel maps to its nearest palette color) holds regardless of
algorithm. Palette colors are kept as real-valued centroids; rounding to
8-bit happens only at image export.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import MismatchedDimensionsError, UnsupportedMethodError

__all__ = [
    "METHODS",
    "Palette",
    "ErrorHistogram",
    "as_image",
    "quantize",
    "error_histogram",
    "palette_document",
]

METHODS = ("minimum-variance", "median-cut", "octree", "k-means")

_KMEANS_MAX_ITER = 50
_KMEANS_TOL = 0.01  # RGB units of centroid movement
_OCTREE_DEPTH = 8


def as_image(image) -> np.ndarray:
    """Coerce input to an (H, W, 3) float64 image array."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    if not np.all(np.isfinite(img)):
        raise ValueError("image pixels must be finite")
    return img


@dataclass(frozen=True)
class Palette:
    """Quantized color set plus the per-pixel assignment that produced it.

    Immutable after construction; safe to share across threads.
    """

    colors: np.ndarray      # (K, 3) float64 centroids
    assignment: np.ndarray  # (H, W) int32 indices into colors
    counts: np.ndarray      # (K,) int64 pixels assigned to each color
    method: str

    def __post_init__(self):
        for arr in (self.colors, self.assignment, self.counts):
            arr.setflags(write=False)

    def reconstruct(self) -> np.ndarray:
        """Image rebuilt from palette colors; the quantized approximation."""
        return self.colors[self.assignment]


@dataclass(frozen=True)
class ErrorHistogram:
    """Distribution of per-pixel Euclidean reconstruction errors."""

    bin_width: float
    fractions: np.ndarray  # fraction of pixels per bin, sums to 1
    mean_error: float
    max_error: float

    @property
    def bin_starts(self) -> np.ndarray:
        return np.arange(len(self.fractions)) * self.bin_width

    def to_csv(self) -> str:
        lines = ["bin_start,fraction"]
        for start, frac in zip(self.bin_starts, self.fractions):
            lines.append(f"{start!r},{frac!r}")
        return "\n".join(lines) + "\n"


def _distinct_colors(img: np.ndarray):
    flat = img.reshape(-1, 3)
    colors, inverse, counts = np.unique(
        flat, axis=0, return_inverse=True, return_counts=True
    )
    return colors, np.asarray(inverse).reshape(-1), counts


def _centroids(colors, counts, boxes) -> np.ndarray:
    out = np.empty((len(boxes), 3))
    for i, box in enumerate(boxes):
        w = counts[box].astype(np.float64)
        out[i] = (w[:, None] * colors[box]).sum(axis=0) / w.sum()
    return out


def _median_cut_boxes(colors, counts, palette_size):
    """Split the most populated box at the weighted median of its longest axis."""
    boxes = [np.arange(len(colors))]
    while len(boxes) < palette_size:
        sizes = [counts[b].sum() if len(b) > 1 else -1 for b in boxes]
        i = int(np.argmax(sizes))
        if sizes[i] < 0:
            break
        box = boxes[i]
        sub = colors[box]
        axis = int(np.argmax(sub.max(axis=0) - sub.min(axis=0)))
        order = np.argsort(sub[:, axis], kind="stable")
        cum = np.cumsum(counts[box][order])
        k = int(np.searchsorted(cum, cum[-1] / 2.0)) + 1
        k = min(max(k, 1), len(box) - 1)
        boxes[i] = box[order[:k]]
        boxes.append(box[order[k:]])
    return boxes


def _median_cut(colors, counts, palette_size) -> np.ndarray:
    return _centroids(colors, counts, _median_cut_boxes(colors, counts, palette_size))


def _box_sse(colors, counts, box) -> float:
    w = counts[box].astype(np.float64)
    c = colors[box]
    s = (w[:, None] * c).sum(axis=0)
    q = (w * (c * c).sum(axis=1)).sum()
    return max(q - (s @ s) / w.sum(), 0.0)


def _best_split(colors, counts, box):
    """Scan all axes/thresholds; returns (left, right) minimizing child SSE sum.

    Cuts are only allowed between distinct coordinate values, so the split
    is a true geometric threshold on the chosen axis.
    """
    c = colors[box]
    w = counts[box].astype(np.float64)
    q = w * (c * c).sum(axis=1)
    best_cost = np.inf
    best = None
    for axis in range(3):
        order = np.argsort(c[:, axis], kind="stable")
        vals = c[order, axis]
        cut_ok = vals[:-1] < vals[1:]
        if not cut_ok.any():
            continue
        ww = w[order]
        W = np.cumsum(ww)
        S = np.cumsum(ww[:, None] * c[order], axis=0)
        Q = np.cumsum(q[order])
        j = np.arange(len(box) - 1)
        left = Q[j] - (S[j] * S[j]).sum(axis=1) / W[j]
        rem_w = W[-1] - W[j]
        rem_s = S[-1] - S[j]
        right = (Q[-1] - Q[j]) - (rem_s * rem_s).sum(axis=1) / rem_w
        cost = np.where(cut_ok, left + right, np.inf)
        k = int(np.argmin(cost))
        if cost[k] < best_cost:
            best_cost = cost[k]
            best = (box[order[: k + 1]], box[order[k + 1 :]])
    return best


def _minimum_variance(colors, counts, palette_size) -> np.ndarray:
    """Recursive box split: largest-SSE box first, best axis/threshold cut."""
    boxes = [np.arange(len(colors))]
    sses = [_box_sse(colors, counts, boxes[0])]
    while len(boxes) < palette_size:
        cand = [s if len(b) > 1 else -1.0 for s, b in zip(sses, boxes)]
        i = int(np.argmax(cand))
        if cand[i] < 0:
            break
        split = _best_split(colors, counts, boxes[i])
        if split is None:
            sses[i] = -1.0
            continue
        left, right = split
        boxes[i] = left
        sses[i] = _box_sse(colors, counts, left)
        boxes.append(right)
        sses.append(_box_sse(colors, counts, right))
    return _centroids(colors, counts, boxes)


class _OctreeNode:
    __slots__ = ("children", "count", "color_sum", "path", "parent")

    def __init__(self, path, parent):
        self.children: list[_OctreeNode | None] = [None] * 8
        self.count = 0
        self.color_sum = np.zeros(3)
        self.path = path
        self.parent = parent

    def is_leaf(self) -> bool:
        return all(ch is None for ch in self.children)

    def reducible(self) -> bool:
        return not self.is_leaf() and all(
            ch is None or ch.is_leaf() for ch in self.children
        )


def _octree(colors, counts, palette_size) -> np.ndarray:
    """Depth-8 octree build, then merge the lowest-count reducible nodes."""
    bits = np.clip(np.floor(colors), 0, 255).astype(np.uint8)
    child_idx = np.zeros((len(colors), _OCTREE_DEPTH), dtype=np.int8)
    for level in range(_OCTREE_DEPTH):
        shift = 7 - level
        child_idx[:, level] = (
            (((bits[:, 0] >> shift) & 1) << 2)
            | (((bits[:, 1] >> shift) & 1) << 1)
            | ((bits[:, 2] >> shift) & 1)
        )
    root = _OctreeNode((), None)
    n_leaves = 0
    for i in range(len(colors)):
        node = root
        node.count += int(counts[i])
        node.color_sum += counts[i] * colors[i]
        for level in range(_OCTREE_DEPTH):
            ci = int(child_idx[i, level])
            if node.children[ci] is None:
                node.children[ci] = _OctreeNode(node.path + (ci,), node)
                if level == _OCTREE_DEPTH - 1:
                    n_leaves += 1
            node = node.children[ci]
            node.count += int(counts[i])
            node.color_sum += counts[i] * colors[i]

    def all_reducible(node):
        out = []
        stack = [node]
        while stack:
            n = stack.pop()
            if n.reducible():
                out.append(n)
            for ch in n.children:
                if ch is not None and not ch.is_leaf():
                    stack.append(ch)
        return out

    heap = [(n.count, n.path, n) for n in all_reducible(root)]
    heapq.heapify(heap)
    while n_leaves > palette_size and heap:
        _, _, node = heapq.heappop(heap)
        if node.is_leaf() or not node.reducible():
            continue
        folded = sum(1 for ch in node.children if ch is not None)
        node.children = [None] * 8
        n_leaves -= folded - 1
        parent = node.parent
        if parent is not None and parent.reducible():
            heapq.heappush(heap, (parent.count, parent.path, parent))

    leaves = []
    stack = [root]
    while stack:
        n = stack.pop()
        if n.is_leaf():
            leaves.append(n)
        else:
            for ch in reversed(n.children):
                if ch is not None:
                    stack.append(ch)
    leaves.sort(key=lambda n: n.path)
    return np.stack([n.color_sum / n.count for n in leaves])


def _kmeans(colors, counts, palette_size) -> np.ndarray:
    """Lloyd iterations on the color histogram, seeded from median-cut."""
    centers = _median_cut(colors, counts, palette_size)
    w = counts.astype(np.float64)
    for _ in range(_KMEANS_MAX_ITER):
        _, assign = cKDTree(centers).query(colors)
        totals = np.bincount(assign, weights=w, minlength=len(centers))
        new = np.empty_like(centers)
        for ch in range(3):
            new[:, ch] = np.bincount(
                assign, weights=w * colors[:, ch], minlength=len(centers)
            )
        occupied = totals > 0
        new[occupied] /= totals[occupied, None]
        new[~occupied] = centers[~occupied]
        movement = float(np.sqrt(((new - centers) ** 2).sum(axis=1)).max())
        centers = new
        if movement < _KMEANS_TOL:
            break
    return centers


_DISPATCH = {
    "minimum-variance": _minimum_variance,
    "median-cut": _median_cut,
    "octree": _octree,
    "k-means": _kmeans,
}


def quantize(image, method: str = "minimum-variance", palette_size: int = 256,
             seed: int = 0) -> Palette:
    """Quantize an image to at most palette_size colors.

    Args:
        image: (H, W, 3) array, channels in [0, 255].
        method: one of METHODS.
        palette_size: maximum number of palette entries.
        seed: reserved for stochastic methods; every current method is
            deterministic, so it has no effect.

    An image with at most palette_size distinct colors is returned
    verbatim (zero reconstruction error). Otherwise the chosen method
    produces centroids, every pixel is reassigned to its nearest centroid,
    and centroids left without pixels are dropped.
    """
    del seed
    img = as_image(image)
    if method not in _DISPATCH:
        raise UnsupportedMethodError(
            f"unknown method {method!r}; expected one of {', '.join(METHODS)}"
        )
    if palette_size < 1:
        raise ValueError("palette_size must be >= 1")
    h, w = img.shape[:2]
    colors, inverse, counts = _distinct_colors(img)

    if len(colors) <= palette_size:
        assignment = inverse.reshape(h, w).astype(np.int32)
        return Palette(colors=colors, assignment=assignment,
                       counts=counts.astype(np.int64), method=method)

    centers = _DISPATCH[method](colors, counts, palette_size)
    # Final pass: snap every distinct color (hence every pixel) to its
    # nearest centroid, then drop centroids that attracted nothing.
    _, nearest = cKDTree(centers).query(colors)
    used, remapped = np.unique(nearest, return_inverse=True)
    palette_colors = centers[used]
    per_color = np.bincount(remapped, weights=counts, minlength=len(used))
    assignment = remapped[inverse].reshape(h, w).astype(np.int32)
    return Palette(colors=palette_colors, assignment=assignment,
                   counts=per_color.astype(np.int64), method=method)


def error_histogram(image, palette: Palette, bin_width: float = 1.0) -> ErrorHistogram:
    """Histogram of per-pixel Euclidean distances to the assigned palette color.

    Fractions are relative to the total pixel count and sum to 1.
    """
    img = as_image(image)
    if palette.assignment.shape != img.shape[:2]:
        raise MismatchedDimensionsError(
            f"palette assignment {palette.assignment.shape} does not match "
            f"image {img.shape[:2]}"
        )
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    err = np.sqrt(((img - palette.reconstruct()) ** 2).sum(axis=2)).ravel()
    idx = np.floor(err / bin_width).astype(np.int64)
    fractions = np.bincount(idx) / err.size
    return ErrorHistogram(
        bin_width=float(bin_width),
        fractions=fractions,
        mean_error=float(err.mean()),
        max_error=float(err.max()),
    )


def palette_document(palette: Palette) -> str:
    """Structured text export: method, size, and one 'r g b count' row per color."""
    lines = [
        "# rgb palette",
        f"method: {palette.method}",
        f"colors: {len(palette.colors)}",
        "# r g b count",
    ]
    for color, count in zip(palette.colors, palette.counts):
        lines.append(f"{color[0]!r} {color[1]!r} {color[2]!r} {int(count)}")
    return "\n".join(lines) + "\n"
