"""Grayscale PGM input/output and the overlapping-patch image pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class PgmError(ValueError):
    """Malformed PGM input; ``offset`` is the byte position of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _next_token(data: bytes, pos: int):
    """Skip whitespace and '#' comments, return (token, start, end)."""
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    if pos >= n:
        raise PgmError("unexpected end of header", n)
    start = pos
    while pos < n and not data[pos:pos + 1].isspace():
        pos += 1
    return data[start:pos], start, pos


def _header_int(data: bytes, pos: int, what: str):
    token, start, end = _next_token(data, pos)
    if not token.isdigit():
        raise PgmError(f"expected {what}, got {token[:16]!r}", start)
    return int(token), end


def read_pgm(path) -> np.ndarray:
    """Read a P2 (ASCII) or P5 (binary) PGM file with maxval 255.

    Returns a uint8 array of shape (height, width). Any malformed header,
    out-of-range sample or truncated payload raises PgmError with the byte
    offset of the failure; other maxvals are rejected.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    magic, magic_at, pos = _next_token(data, 0)
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"unsupported magic {magic[:16]!r}", magic_at)
    width, pos = _header_int(data, pos, "width")
    height, pos = _header_int(data, pos, "height")
    if width < 1 or height < 1:
        raise PgmError(f"bad dimensions {width}x{height}", pos)
    maxval, pos = _header_int(data, pos, "maxval")
    if maxval != 255:
        raise PgmError(f"unsupported maxval {maxval}, only 255 is handled",
                       pos)
    count = width * height
    if magic == b"P5":
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise PgmError("expected single whitespace after maxval", pos)
        pos += 1
        if len(data) - pos < count:
            raise PgmError(f"truncated pixel data, expected {count} bytes, "
                           f"found {len(data) - pos}", len(data))
        pixels = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos)
    else:
        values = np.empty(count, dtype=np.uint8)
        for k in range(count):
            token, start, pos = _next_token(data, pos)
            if not token.isdigit():
                raise PgmError(f"expected pixel value, got {token[:16]!r}",
                               start)
            v = int(token)
            if v > maxval:
                raise PgmError(f"pixel value {v} exceeds maxval", start)
            values[k] = v
        pixels = values
    return pixels.reshape(height, width).copy()


def write_pgm(path, image, binary: bool = True) -> None:
    """Write an image as PGM with maxval 255. Values are rounded and
    clipped to [0, 255]; ``binary`` picks P5 over P2."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError("a 2-d image is required")
    arr = np.clip(np.rint(arr.astype(float)), 0, 255).astype(np.uint8)
    h, w = arr.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(arr.tobytes())
        else:
            fh.write(f"P2\n{w} {h}\n255\n".encode("ascii"))
            lines = [" ".join(str(v) for v in row) for row in arr]
            fh.write(("\n".join(lines) + "\n").encode("ascii"))


def patch_count(height: int, width: int, patch_side: int, stride: int) -> int:
    """Number of patches: (floor((W-p)/s)+1) * (floor((H-p)/s)+1)."""
    if patch_side < 1 or stride < 1:
        raise ValueError("patch_side and stride must be at least 1")
    if patch_side > height or patch_side > width:
        raise ValueError("patch does not fit inside the image")
    return (((width - patch_side) // stride + 1)
            * ((height - patch_side) // stride + 1))


@dataclass
class PatchDataset:
    """Vectorized overlapping patches of one image.

    ``patches`` has one column per patch (row-major flattening of each
    patch), columns ordered by row-major top-left corners.
    """

    patches: np.ndarray
    image_shape: tuple
    patch_side: int
    stride: int

    @property
    def num_patches(self) -> int:
        return self.patches.shape[1]

    def block_slices(self, num_agents: int) -> list:
        """Contiguous column blocks, remainder spread over the first ones."""
        n = self.num_patches
        if num_agents < 1 or num_agents > n:
            raise ValueError(f"cannot split {n} patches over "
                             f"{num_agents} agents")
        base, extra = divmod(n, num_agents)
        slices, lo = [], 0
        for i in range(num_agents):
            hi = lo + base + (1 if i < extra else 0)
            slices.append(slice(lo, hi))
            lo = hi
        return slices

    def blocks(self, num_agents: int) -> list:
        return [self.patches[:, s] for s in self.block_slices(num_agents)]


def extract_patches(image, patch_side: int, stride: int = 1) -> PatchDataset:
    """Collect all patch_side x patch_side windows on the stride grid."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError("a 2-d image is required")
    h, w = img.shape
    patch_count(h, w, patch_side, stride)  # validates the geometry
    windows = sliding_window_view(img, (patch_side, patch_side))
    windows = windows[::stride, ::stride]
    nr, nc = windows.shape[:2]
    patches = windows.reshape(nr * nc, patch_side * patch_side).T.copy()
    return PatchDataset(patches=patches, image_shape=(h, w),
                        patch_side=patch_side, stride=stride)


def reconstruct_image(dataset: PatchDataset, D, X_blocks,
                      scale: float = 1.0) -> np.ndarray:
    """Assemble the image from decoded patches ``scale * D @ [X_1 ... X_I]``.

    Overlapping pixels are averaged uniformly, pixels never covered by the
    stride grid are left at zero, and the result is clipped to [0, 255].
    """
    X = np.hstack([np.asarray(Xb, dtype=float) for Xb in X_blocks])
    decoded = scale * (np.asarray(D, dtype=float) @ X)
    return assemble_patches(decoded, dataset.image_shape, dataset.patch_side,
                            dataset.stride)


def assemble_patches(patches, image_shape, patch_side: int,
                     stride: int) -> np.ndarray:
    """Place patch columns at their row-major grid origins and average the
    overlaps; clips to [0, 255]."""
    h, w = image_shape
    p = patch_side
    expected = patch_count(h, w, p, stride)
    patches = np.asarray(patches, dtype=float)
    if patches.shape != (p * p, expected):
        raise ValueError(f"patch matrix has shape {patches.shape}, expected "
                         f"({p * p}, {expected})")
    acc = np.zeros((h, w))
    cnt = np.zeros((h, w))
    k = 0
    for r in range(0, h - p + 1, stride):
        for c in range(0, w - p + 1, stride):
            acc[r:r + p, c:c + p] += patches[:, k].reshape(p, p)
            cnt[r:r + p, c:c + p] += 1.0
            k += 1
    out = np.divide(acc, cnt, out=np.zeros_like(acc), where=cnt > 0)
    return np.clip(out, 0.0, 255.0)
