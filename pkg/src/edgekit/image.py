"""Grayscale images, binary edge maps and raster file I/O (PGM P2/P5, PNG)."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_VALUE = 255

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class ImageError(ValueError):
    """Base class for image construction and I/O failures."""


class UnsupportedFormatError(ImageError):
    pass


class CorruptImageError(ImageError):
    pass


class ImageReadError(ImageError):
    """The file could not be opened or read at all."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Real-valued intensities in [0, 255], stored as a read-only (height, width) array."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ImageError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ImageError(f"image must be at least 1x1, got {arr.shape[1]}x{arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ImageError("image contains non-finite values")
        if arr.min() < 0 or arr.max() > MAX_VALUE:
            raise ImageError("intensities must lie in [0, 255]")
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def max_intensity(self) -> float:
        return max_intensity(self)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    @classmethod
    def from_flat(cls, data, width: int, height: int) -> "GrayImage":
        flat = np.asarray(data, dtype=np.float64).ravel()
        if width < 1 or height < 1:
            raise ImageError(f"image must be at least 1x1, got {width}x{height}")
        if flat.size != width * height:
            raise ImageError(f"{flat.size} values do not fill a {width}x{height} image")
        return cls(flat.reshape(height, width))


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Binary image whose pixels are exactly 0 or 255 (white = edge)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ImageError(f"edge map must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.all((arr == 0) | (arr == MAX_VALUE)):
            raise ImageError("edge map values must be exactly 0 or 255")
        object.__setattr__(self, "data", _frozen(arr.astype(np.uint8, copy=True)))

    @classmethod
    def from_mask(cls, mask) -> "EdgeMap":
        return cls(np.where(np.asarray(mask, dtype=bool), MAX_VALUE, 0).astype(np.uint8))

    @property
    def mask(self) -> np.ndarray:
        return self.data == MAX_VALUE

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def count(self) -> int:
        return int(np.count_nonzero(self.data))

    def __eq__(self, other):
        if not isinstance(other, EdgeMap):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))


def to_grayscale(rgb_pixels, width: int, height: int) -> GrayImage:
    """Convert RGB triples (``(N, 3)`` or ``(height, width, 3)``) to BT.601 luma."""
    rgb = np.asarray(rgb_pixels, dtype=np.float64)
    if width < 1 or height < 1:
        raise ImageError(f"image must be at least 1x1, got {width}x{height}")
    if rgb.shape[-1:] != (3,) or rgb.size != width * height * 3:
        raise ImageError(
            f"pixel array of shape {rgb.shape} does not match a {width}x{height} RGB image"
        )
    rgb = rgb.reshape(height, width, 3)
    if rgb.min() < 0 or rgb.max() > MAX_VALUE:
        raise ImageError("channel values must lie in [0, 255]")
    wr, wg, wb = LUMA_WEIGHTS
    gray = wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]
    # the weights sum to 1 only up to rounding; keep the result a convex combination
    gray = np.clip(gray, rgb.min(axis=-1), rgb.max(axis=-1))
    return GrayImage(gray)


def max_intensity(image: GrayImage) -> float:
    return float(image.data.max())


def quantize(image: GrayImage | EdgeMap) -> np.ndarray:
    """8-bit pixel values: round half up, clamp to [0, 255]."""
    if isinstance(image, EdgeMap):
        return np.array(image.data, dtype=np.uint8)
    return np.clip(np.floor(image.data + 0.5), 0, MAX_VALUE).astype(np.uint8)


# ---------------------------------------------------------------------------
# PGM


def _pgm_tokens(raw: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens = []
    n = len(raw)
    while len(tokens) < count:
        while pos < n and raw[pos : pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise CorruptImageError("truncated PGM header")
        if raw[pos : pos + 1] == b"#":
            eol = raw.find(b"\n", pos)
            pos = n if eol < 0 else eol + 1
            continue
        start = pos
        while pos < n and not raw[pos : pos + 1].isspace() and raw[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(raw[start:pos])
    return tokens, pos


def _parse_pgm(raw: bytes) -> np.ndarray:
    magic = raw[:2]
    if len(raw) < 2:
        raise CorruptImageError("truncated PGM header")
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormatError(f"not a P2/P5 PGM file (magic {magic!r})")
    tokens, pos = _pgm_tokens(raw, 3, 2)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise CorruptImageError(f"malformed PGM header: {tokens!r}") from exc
    if width < 1 or height < 1:
        raise CorruptImageError(f"bad PGM dimensions {width}x{height}")
    if not 1 <= maxval <= MAX_VALUE:
        raise UnsupportedFormatError(f"PGM maxval {maxval} unsupported (8-bit only)")

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(raw) or not raw[pos : pos + 1].isspace():
            raise CorruptImageError("truncated PGM header")
        body = raw[pos + 1 : pos + 1 + width * height]
        if len(body) < width * height:
            raise CorruptImageError(
                f"PGM raster truncated: {len(body)} of {width * height} bytes"
            )
        values = np.frombuffer(body, dtype=np.uint8).astype(np.float64)
    else:
        fields = raw[pos:].split()
        if len(fields) < width * height:
            raise CorruptImageError(
                f"PGM raster truncated: {len(fields)} of {width * height} samples"
            )
        try:
            values = np.array([int(f) for f in fields[: width * height]], dtype=np.float64)
        except ValueError as exc:
            raise CorruptImageError("non-integer sample in plain PGM") from exc
        if values.max() > maxval:
            raise CorruptImageError("PGM sample exceeds maxval")

    if maxval != MAX_VALUE:
        values = values * (MAX_VALUE / maxval)
    return values.reshape(height, width)


def _encode_pgm(pixels: np.ndarray, plain: bool = False) -> bytes:
    h, w = pixels.shape
    if plain:
        rows = "\n".join(" ".join(str(int(v)) for v in row) for row in pixels)
        return f"P2\n{w} {h}\n255\n{rows}\n".encode("ascii")
    return f"P5\n{w} {h}\n255\n".encode("ascii") + pixels.astype(np.uint8).tobytes()


# ---------------------------------------------------------------------------
# PNG (decoding/encoding delegated to Pillow)


def _parse_png(path: Path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("I;16", "I;16B", "I", "F"):
                raise UnsupportedFormatError(f"{path}: {mode} PNGs are not supported (8-bit only)")
            if mode in ("L", "1"):
                return np.asarray(im.convert("L"), dtype=np.float64)
            if mode == "LA":
                return np.asarray(im.getchannel("L"), dtype=np.float64)
            rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise CorruptImageError(f"{path}: cannot decode PNG ({exc})") from exc
    h, w, _ = rgb.shape
    return to_grayscale(rgb, w, h).data


def _image_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".pnm"):
        return "pgm"
    if suffix == ".png":
        return "png"
    raise UnsupportedFormatError(f"{path}: unsupported extension {path.suffix!r}")


def load_image(path) -> GrayImage:
    """Read a PGM (P2/P5) or PNG file as a grayscale image; RGB PNGs are converted to luma."""
    path = Path(path)
    try:
        head = path.read_bytes()
    except OSError as exc:
        raise ImageReadError(f"{path}: cannot read ({exc.strerror or exc})") from exc
    if head[:8] == b"\x89PNG\r\n\x1a\n":
        return GrayImage(_parse_png(path))
    if head[:1] == b"P":
        return GrayImage(_parse_pgm(head))
    if len(head) < 2:
        raise CorruptImageError(f"{path}: file too short to hold an image header")
    raise UnsupportedFormatError(f"{path}: unrecognised image signature")


def load_edge_map(path) -> EdgeMap:
    """Read a ground-truth mask; any nonzero pixel counts as boundary."""
    img = load_image(path)
    return EdgeMap.from_mask(img.data > 0)


def atomic_write_bytes(path, payload: bytes) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_image(image: GrayImage | EdgeMap, fmt: str, plain: bool = False) -> bytes:
    pixels = quantize(image)
    if fmt == "pgm":
        return _encode_pgm(pixels, plain=plain)
    if fmt == "png":
        import io

        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(pixels).save(buf, format="PNG")
        return buf.getvalue()
    raise UnsupportedFormatError(f"unsupported output format {fmt!r}")


def save_image(path, image: GrayImage | EdgeMap, plain: bool = False) -> None:
    """Write ``image`` as 8-bit PGM or PNG, chosen by extension. ``plain`` selects P2 for PGM."""
    path = Path(path)
    atomic_write_bytes(path, encode_image(image, _image_format(path), plain=plain))
