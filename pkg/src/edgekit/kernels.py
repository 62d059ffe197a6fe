"""Gradient kernels: classical 3x3 Sobel, zero-dilated extended Sobel, 5x5 comparison filters.

An extended Sobel kernel of odd size ``n`` keeps the nine 3x3 Sobel weights and
spreads them onto rows/columns ``{0, (n-1)/2, n-1}``; every other entry is 0.
So it always has six nonzero taps regardless of size.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

EXTENDED_SIZES = (3, 5, 7, 9, 11, 13, 15)
COMPARISON_FAMILIES = ("sobel5_gupta", "prewitt5", "mod_prewitt5", "scharr5")
# "sobel" and "extended" name the same family; size 3 is the classical operator
EXTENDED_ALIASES = ("extended", "sobel")
AXES = ("x", "y")

_SOBEL_X = np.array([[1, 0, -1], [2, 0, -2], [1, 0, -1]], dtype=np.float64)
_SOBEL_Y = np.array([[1, 2, 1], [0, 0, 0], [-1, -2, -1]], dtype=np.float64)


class KernelError(ValueError):
    pass


def _check_axis(axis: str) -> str:
    ax = str(axis).lower()
    if ax not in AXES:
        raise KernelError(f"axis must be 'x' or 'y', got {axis!r}")
    return ax


@dataclass(frozen=True, eq=False)
class Kernel:
    """Square, odd-sized gradient kernel applied by correlation.

    X kernels negate under a left-right mirror, Y kernels under an up-down
    mirror, and coefficients always sum to zero.
    """

    name: str
    axis: str
    coeffs: np.ndarray

    def __post_init__(self):
        axis = _check_axis(self.axis)
        c = np.array(self.coeffs, dtype=np.float64, copy=True)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise KernelError(f"{self.name}: kernel must be square, got shape {c.shape}")
        n = c.shape[0]
        if n < 3 or n % 2 == 0:
            raise KernelError(f"{self.name}: kernel size must be odd and >= 3, got {n}")
        if not np.all(np.isfinite(c)):
            raise KernelError(f"{self.name}: non-finite coefficient")
        if c.sum() != 0:
            raise KernelError(f"{self.name}/{axis}: coefficients sum to {c.sum()}, expected 0")
        mirrored = c[:, ::-1] if axis == "x" else c[::-1, :]
        if not np.array_equal(mirrored, -c):
            raise KernelError(f"{self.name}/{axis}: kernel is not mirror-antisymmetric")
        c.setflags(write=False)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "coeffs", c)

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    def taps(self) -> list[tuple[int, int, float]]:
        """Nonzero coefficients as ``(row, col, weight)`` in row-major order."""
        rows, cols = np.nonzero(self.coeffs)
        return [(int(r), int(c), float(self.coeffs[r, c])) for r, c in zip(rows, cols)]

    def __eq__(self, other):
        if not isinstance(other, Kernel):
            return NotImplemented
        return (
            self.name == other.name
            and self.axis == other.axis
            and np.array_equal(self.coeffs, other.coeffs)
        )


def sobel_3x3(axis: str) -> Kernel:
    ax = _check_axis(axis)
    return Kernel("sobel3", ax, _SOBEL_X if ax == "x" else _SOBEL_Y)


def extended_sobel(size: int, axis: str) -> Kernel:
    """Zero-dilated Sobel kernel of the given odd size (3..15)."""
    if size not in EXTENDED_SIZES:
        raise KernelError(f"extended Sobel size must be one of {EXTENDED_SIZES}, got {size!r}")
    ax = _check_axis(axis)
    base = _SOBEL_X if ax == "x" else _SOBEL_Y
    d = (size - 1) // 2
    coeffs = np.zeros((size, size))
    coeffs[::d, ::d] = base
    return Kernel(f"extended{size}", ax, coeffs)


# ---------------------------------------------------------------------------
# registry file


def parse_kernel_records(text: str, source: str = "<text>") -> list[Kernel]:
    """Parse ``name axis size`` records, each followed by ``size`` coefficient rows."""
    lines = [
        (no, line.strip())
        for no, line in enumerate(text.splitlines(), 1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    kernels = []
    i = 0
    while i < len(lines):
        no, header = lines[i]
        parts = header.split()
        if len(parts) != 3:
            raise KernelError(f"{source}:{no}: expected 'name axis size', got {header!r}")
        name, axis, size_s = parts
        try:
            size = int(size_s)
        except ValueError:
            raise KernelError(f"{source}:{no}: bad kernel size {size_s!r}") from None
        if size < 1:
            raise KernelError(f"{source}:{no}: bad kernel size {size}")
        rows = lines[i + 1 : i + 1 + size]
        if len(rows) < size:
            raise KernelError(f"{source}:{no}: {name}/{axis} has fewer than {size} rows")
        matrix = []
        for row_no, row in rows:
            try:
                values = [float(v) for v in row.split()]
            except ValueError:
                raise KernelError(f"{source}:{row_no}: non-numeric coefficient in {row!r}") from None
            if len(values) != size:
                raise KernelError(f"{source}:{row_no}: expected {size} coefficients, got {len(values)}")
            matrix.append(values)
        try:
            kernels.append(Kernel(name, axis, np.array(matrix)))
        except KernelError as exc:
            raise KernelError(f"{source}:{no}: {exc}") from None
        i += 1 + size
    return kernels


def load_registry(path=None) -> dict[tuple[str, str], Kernel]:
    """Load comparison kernels keyed by ``(family, axis)``; defaults to the bundled file."""
    if path is None:
        return dict(_bundled_registry())
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise KernelError(f"cannot read kernel registry {path}: {exc}") from exc
    return _index(parse_kernel_records(text, str(path)))


def _index(kernels: list[Kernel]) -> dict[tuple[str, str], Kernel]:
    table = {}
    for k in kernels:
        key = (k.name, k.axis)
        if key in table:
            raise KernelError(f"duplicate registry entry {k.name}/{k.axis}")
        table[key] = k
    return table


@functools.lru_cache(maxsize=1)
def _bundled_registry() -> dict[tuple[str, str], Kernel]:
    text = resources.files("edgekit").joinpath("data/comparison_kernels.txt").read_text()
    return _index(parse_kernel_records(text, "comparison_kernels.txt"))


def comparison_kernel(family: str, axis: str, registry=None) -> Kernel:
    ax = _check_axis(axis)
    table = _bundled_registry() if registry is None else registry
    fam = family.lower()
    try:
        return table[(fam, ax)]
    except KeyError:
        known = sorted({name for name, _ in table})
        raise KernelError(f"unknown kernel family {family!r}; known: {', '.join(known)}") from None


# ---------------------------------------------------------------------------
# family/size selectors


@dataclass(frozen=True)
class KernelSpec:
    """A gradient-kernel choice: ``extended`` (any size in 3..15) or a 5x5 comparison family."""

    family: str = "extended"
    size: int = 3

    def __post_init__(self):
        fam = self.family.lower()
        if fam in EXTENDED_ALIASES:
            fam = "extended"
            if self.size not in EXTENDED_SIZES:
                raise KernelError(
                    f"extended Sobel size must be one of {EXTENDED_SIZES}, got {self.size!r}"
                )
        elif fam in COMPARISON_FAMILIES:
            if self.size != 5:
                raise KernelError(f"{fam} exists only as a 5x5 kernel, got size {self.size}")
        else:
            choices = ", ".join(EXTENDED_ALIASES + COMPARISON_FAMILIES)
            raise KernelError(f"unknown kernel family {self.family!r}; choose from {choices}")
        object.__setattr__(self, "family", fam)

    @property
    def label(self) -> str:
        if self.family == "extended":
            return f"extended{self.size}"
        return self.family

    def kernel(self, axis: str) -> Kernel:
        if self.family == "extended":
            return extended_sobel(self.size, axis)
        return comparison_kernel(self.family, axis)

    def pair(self) -> tuple[Kernel, Kernel]:
        return self.kernel("x"), self.kernel("y")

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        """Accept ``extended7``, ``extended:7``, ``7`` or a comparison family name."""
        t = text.strip().lower()
        if t.isdigit():
            return cls("extended", int(t))
        for alias in EXTENDED_ALIASES:
            if t.startswith(alias):
                rest = t[len(alias):].lstrip(":")
                if rest.isdigit():
                    return cls("extended", int(rest))
        if t in COMPARISON_FAMILIES:
            return cls(t, 5)
        raise KernelError(f"cannot parse kernel selector {text!r}")


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def kernel_dump(kernel: Kernel) -> str:
    """Render as a registry record; :func:`parse_kernel_records` reads it back exactly."""
    cells = [[_fmt(v) for v in row] for row in kernel.coeffs]
    width = max(len(c) for row in cells for c in row)
    body = "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)
    return f"{kernel.name} {kernel.axis} {kernel.size}\n{body}\n"
