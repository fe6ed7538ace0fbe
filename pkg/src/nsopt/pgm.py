"""PGM (portable graymap) read/write for GrayImage.

Stored sample values 0..255 map to pixel values 1..256 (shift by one), so a
full-black file pixel is 1 and full-white is 256.  Both ASCII (P2) and binary
(P5) variants are supported.
"""

from __future__ import annotations

import numpy as np

from .denoise import GrayImage


def _tokens(data: bytes):
    """Header tokens, skipping whitespace and # comments."""
    i = 0
    while i < len(data):
        ch = data[i:i + 1]
        if ch.isspace():
            i += 1
            continue
        if ch == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        yield data[i:j], j
        i = j


def read_pgm(path: str) -> GrayImage:
    with open(path, "rb") as fh:
        data = fh.read()
    tok = _tokens(data)
    magic, _ = next(tok)
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"not a PGM file: magic {magic!r}")
    (w, _), (h, _), (maxval, end) = next(tok), next(tok), next(tok)
    width, height, maxval = int(w), int(h), int(maxval)
    if maxval < 1 or maxval > 255:
        raise ValueError("only 8-bit PGM files are supported")
    if magic == b"P5":
        start = end + 1  # single whitespace byte after maxval
        raster = np.frombuffer(data, dtype=np.uint8, count=width * height,
                               offset=start)
    else:
        values = data[end:].split()
        if len(values) < width * height:
            raise ValueError("truncated PGM raster")
        raster = np.array([int(v) for v in values[: width * height]])
    pixels = raster.reshape(height, width).astype(int) + 1
    return GrayImage(pixels=pixels)


def write_pgm(image: GrayImage, path: str, binary: bool = True) -> None:
    stored = (image.pixels - 1).astype(np.uint8)
    header = f"P5\n{image.n_c} {image.n_r}\n255\n"
    if binary:
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(stored.tobytes())
        return
    lines = ["P2", f"{image.n_c} {image.n_r}", "255"]
    lines += [" ".join(str(v) for v in row) for row in stored]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
