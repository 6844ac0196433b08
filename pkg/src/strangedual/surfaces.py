"""Exact intersection theory and Mukai-vector algebra on K3-type surfaces.

Three surface models are supported, each carrying its Neron-Severi lattice,
holomorphic Euler characteristic chi(O) and canonical class:

* ``generic_k3(2n)``        Pic = Z.H with H^2 = 2n > 0, K = 0, chi(O) = 2
* ``elliptic_k3()``         NS = Z.sigma + Z.f with sigma^2 = -2, f^2 = 0,
                            sigma.f = 1, K = 0, chi(O) = 2
* ``elliptic_general(chi)`` sigma^2 = -chi, f^2 = 0, sigma.f = 1,
                            K = (chi - 2).f, chi(O) = chi >= 1

A Mukai vector is stored as (rank, c1, s).  On the two K3 models the integer
slot ``s`` is the degree-4 Mukai component v4 = ch2 + rank; on the general
elliptic model square roots of the Todd class are not integral, so ``s``
stores the Euler characteristic chi directly and ch2 is derived by
Riemann-Roch (ch2 = chi - rank*chi_O + c1.K/2).

All arithmetic is exact: plain Python integers throughout, with
fractions.Fraction for the few half-integer intermediates.  No floats.
Every value is immutable, every operation a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

GENERIC_K3 = "generic_k3"
ELLIPTIC_K3 = "elliptic_k3"
ELLIPTIC_GENERAL = "elliptic_general"


class ModelMismatchError(ValueError):
    """Lattice elements from different surface models were combined."""


@dataclass(frozen=True)
class SurfaceModel:
    """An intersection lattice together with chi(O) and the canonical class."""

    kind: str
    degree: int = 0  # H^2, generic K3 only
    chi_o: int = 2

    def __post_init__(self) -> None:
        if self.kind == GENERIC_K3:
            if self.degree <= 0 or self.degree % 2 != 0:
                raise ValueError("generic K3 degree must be a positive even integer")
            if self.chi_o != 2:
                raise ValueError("a K3 surface has chi(O) = 2")
        elif self.kind == ELLIPTIC_K3:
            if self.degree != 0:
                raise ValueError("elliptic K3 model takes no degree")
            if self.chi_o != 2:
                raise ValueError("a K3 surface has chi(O) = 2")
        elif self.kind == ELLIPTIC_GENERAL:
            if self.degree != 0:
                raise ValueError("general elliptic model takes no degree")
            if self.chi_o < 1:
                raise ValueError("chi(O) must be >= 1")
        else:
            raise ValueError(f"unknown surface kind {self.kind!r}")

    # -- basic shape ------------------------------------------------------

    @property
    def ns_rank(self) -> int:
        return 1 if self.kind == GENERIC_K3 else 2

    @property
    def is_k3(self) -> bool:
        return self.kind in (GENERIC_K3, ELLIPTIC_K3)

    @property
    def is_elliptic(self) -> bool:
        return self.kind in (ELLIPTIC_K3, ELLIPTIC_GENERAL)

    # -- named classes ----------------------------------------------------

    def cls(self, *coeffs: int) -> "NSClass":
        if len(coeffs) != self.ns_rank:
            raise ValueError(
                f"{self.kind} expects {self.ns_rank} coefficient(s), got {len(coeffs)}"
            )
        return NSClass(self, tuple(int(c) for c in coeffs))

    @property
    def zero(self) -> "NSClass":
        return self.cls(*([0] * self.ns_rank))

    @property
    def hyperplane(self) -> "NSClass":
        if self.kind != GENERIC_K3:
            raise ModelMismatchError("H is the generator of the rank-1 model only")
        return self.cls(1)

    @property
    def sigma(self) -> "NSClass":
        if self.ns_rank != 2:
            raise ModelMismatchError("sigma lives on the elliptic models")
        return self.cls(1, 0)

    @property
    def fiber(self) -> "NSClass":
        if self.ns_rank != 2:
            raise ModelMismatchError("f lives on the elliptic models")
        return self.cls(0, 1)

    @property
    def canonical(self) -> "NSClass":
        if self.kind == ELLIPTIC_GENERAL:
            return self.cls(0, self.chi_o - 2)
        return self.zero


def generic_k3(degree: int) -> SurfaceModel:
    return SurfaceModel(GENERIC_K3, degree=degree)


def elliptic_k3() -> SurfaceModel:
    return SurfaceModel(ELLIPTIC_K3)


def elliptic_general(chi_o: int) -> SurfaceModel:
    return SurfaceModel(ELLIPTIC_GENERAL, chi_o=chi_o)


@dataclass(frozen=True)
class NSClass:
    """An integer divisor class in the Neron-Severi lattice of a model."""

    model: SurfaceModel
    coeffs: tuple[int, ...]

    def _require_same(self, other: "NSClass") -> None:
        if not isinstance(other, NSClass):
            raise TypeError(f"expected NSClass, got {type(other).__name__}")
        if self.model != other.model:
            raise ModelMismatchError("NS classes live on different surface models")

    def __add__(self, other: "NSClass") -> "NSClass":
        self._require_same(other)
        return NSClass(self.model, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "NSClass") -> "NSClass":
        self._require_same(other)
        return NSClass(self.model, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "NSClass":
        return NSClass(self.model, tuple(-a for a in self.coeffs))

    def __rmul__(self, k: int) -> "NSClass":
        if not isinstance(k, int):
            raise TypeError("NS classes only scale by integers")
        return NSClass(self.model, tuple(k * a for a in self.coeffs))

    __mul__ = __rmul__

    def dot(self, other: "NSClass") -> int:
        """Intersection pairing with ``other`` (symmetric, bilinear, exact)."""
        self._require_same(other)
        if self.model.kind == GENERIC_K3:
            return self.coeffs[0] * other.coeffs[0] * self.model.degree
        x1, y1 = self.coeffs
        x2, y2 = other.coeffs
        # sigma^2 = -chi(O), f^2 = 0, sigma.f = 1 (chi(O) = 2 on the K3)
        return -self.model.chi_o * x1 * x2 + x1 * y2 + y1 * x2

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __str__(self) -> str:
        if self.model.kind == GENERIC_K3:
            return f"{self.coeffs[0]}H"
        x, y = self.coeffs
        return f"{x}s+{y}f"


def ns_pair(d1: NSClass, d2: NSClass) -> int:
    """Intersection number d1.d2 on their common model."""
    return d1.dot(d2)


def chi_rr(d: NSClass) -> int:
    """Euler characteristic chi(O(d)) = d.(d - K)/2 + chi(O) by Riemann-Roch."""
    model = d.model
    num = d.dot(d) - d.dot(model.canonical)
    assert num % 2 == 0  # D.(D-K) is even on any surface
    return num // 2 + model.chi_o


def h0_surface(d: NSClass) -> int | None:
    """Global-section count of O(m.sigma + n.f) on the elliptic K3.

    Returns None ("unknown") outside the ranges where the count is pinned:
    0 for m >= 0, n < 0; 2 + m(n - m) in the big-and-nef range m > 0,
    n >= 2m; 1 for multiples of the section (n = 0, m >= 0); n + 1 for
    pure fiber classes (m = 0, n >= 0).
    """
    if d.model.kind != ELLIPTIC_K3:
        raise ModelMismatchError("section counts are pinned on the elliptic K3 only")
    m, n = d.coeffs
    if m >= 0 and n < 0:
        return 0
    if m > 0 and n >= 2 * m:
        return 2 + m * (n - m)
    if n == 0 and m >= 0:
        return 1
    if m == 0 and n >= 0:
        return n + 1
    return None


# ---------------------------------------------------------------------------
# Mukai vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MukaiVector:
    """A lattice vector (rank, c1, s).

    ``s`` is the degree-4 Mukai component on K3 models and the Euler
    characteristic on the general elliptic model (see module docstring).
    """

    r: int
    c1: NSClass
    s: int

    @property
    def model(self) -> SurfaceModel:
        return self.c1.model

    def _require_same(self, other: "MukaiVector") -> None:
        if not isinstance(other, MukaiVector):
            raise TypeError(f"expected MukaiVector, got {type(other).__name__}")
        if self.model != other.model:
            raise ModelMismatchError("Mukai vectors live on different surface models")

    def __add__(self, other: "MukaiVector") -> "MukaiVector":
        self._require_same(other)
        return MukaiVector(self.r + other.r, self.c1 + other.c1, self.s + other.s)

    def __sub__(self, other: "MukaiVector") -> "MukaiVector":
        self._require_same(other)
        return MukaiVector(self.r - other.r, self.c1 - other.c1, self.s - other.s)

    def __neg__(self) -> "MukaiVector":
        return MukaiVector(-self.r, -self.c1, -self.s)

    def __rmul__(self, k: int) -> "MukaiVector":
        if not isinstance(k, int):
            raise TypeError("Mukai vectors only scale by integers")
        return MukaiVector(k * self.r, k * self.c1, k * self.s)

    __mul__ = __rmul__

    @property
    def is_zero(self) -> bool:
        return self.r == 0 and self.s == 0 and self.c1.is_zero

    def content(self) -> int:
        """gcd of all integer coordinates (0 for the zero vector)."""
        g = gcd(abs(self.r), abs(self.s))
        for c in self.c1.coeffs:
            g = gcd(g, abs(c))
        return g

    def divide(self, k: int) -> "MukaiVector":
        if k == 0 or self.r % k or self.s % k or any(c % k for c in self.c1.coeffs):
            raise ValueError(f"vector is not divisible by {k}")
        return MukaiVector(
            self.r // k, NSClass(self.model, tuple(c // k for c in self.c1.coeffs)), self.s // k
        )

    def __str__(self) -> str:
        return f"({self.r}; {self.c1}; {self.s})"


def ch2(v: MukaiVector) -> Fraction:
    """Degree-4 Chern character, derived from the stored slots per model."""
    if v.model.is_k3:
        return Fraction(v.s - v.r)
    return Fraction(v.s - v.r * v.model.chi_o) + Fraction(v.c1.dot(v.model.canonical), 2)


def chi_vec(v: MukaiVector) -> int:
    """Euler characteristic chi(v) by Riemann-Roch (= r + s on K3 models)."""
    if v.model.is_k3:
        return v.r + v.s
    return v.s


def mukai_dual(v: MukaiVector) -> MukaiVector:
    """The dual class: ch_i goes to (-1)^i ch_i, i.e. c1 is negated.

    On K3 models the s-slot is untouched; on the general model the stored
    Euler characteristic picks up the c1.K correction forced by Riemann-Roch.
    """
    if v.model.is_k3:
        return MukaiVector(v.r, -v.c1, v.s)
    return MukaiVector(v.r, -v.c1, v.s + v.c1.dot(v.model.canonical))


def mukai_pair(v: MukaiVector, w: MukaiVector) -> int:
    """Mukai pairing <v, w> = c1(v).c1(w) - v0*w4 - v4*w0 (K3 models only)."""
    v._require_same(w)
    if not v.model.is_k3:
        raise ModelMismatchError(
            "the Mukai pairing needs integral degree-4 components; "
            "the general elliptic model stores chi instead"
        )
    return v.c1.dot(w.c1) - v.r * w.s - v.s * w.r


def mukai_tensor(v: MukaiVector, w: MukaiVector) -> MukaiVector:
    """The K-theory product, computed through Chern characters.

    ch0 = r1*r2, ch1 = r1*c1(w) + r2*c1(v),
    ch2 = r1*ch2(w) + r2*ch2(v) + c1(v).c1(w), then converted back to the
    model's stored slots.  The chi of the product collapses to the integral
    formula r1*chi2 + r2*chi1 + c1.c2 - r1*r2*chi(O), valid on all models.
    """
    v._require_same(w)
    rank = v.r * w.r
    c1 = v.r * w.c1 + w.r * v.c1
    chi = (
        v.r * chi_vec(w)
        + w.r * chi_vec(v)
        + v.c1.dot(w.c1)
        - v.r * w.r * v.model.chi_o
    )
    if v.model.is_k3:
        return MukaiVector(rank, c1, chi - rank)
    return MukaiVector(rank, c1, chi)


def structure_vector(model: SurfaceModel) -> MukaiVector:
    """v(O_X): the unit of the tensor product."""
    if model.is_k3:
        return MukaiVector(1, model.zero, 1)
    return MukaiVector(1, model.zero, model.chi_o)


def point_vector(model: SurfaceModel) -> MukaiVector:
    """v(O_p) of a point sheaf."""
    return MukaiVector(0, model.zero, 1)


def line_bundle_vector(d: NSClass) -> MukaiVector:
    """v(O(d))."""
    chi = chi_rr(d)
    if d.model.is_k3:
        return MukaiVector(1, d, chi - 1)
    return MukaiVector(1, d, chi)


def ideal_sheaf_vector(d: NSClass, n: int) -> MukaiVector:
    """v(I_Z(d)) for a length-n subscheme Z."""
    if n < 0:
        raise ValueError("subscheme length must be >= 0")
    chi = chi_rr(d) - n
    if d.model.is_k3:
        return MukaiVector(1, d, chi - 1)
    return MukaiVector(1, d, chi)


def twist(v: MukaiVector, d: NSClass) -> MukaiVector:
    """The vector of v tensored with O(d): multiplication by e^d."""
    if v.model != d.model:
        raise ModelMismatchError("twisting class lives on a different model")
    c1 = v.c1 + v.r * d
    dd = d.dot(d)
    if v.model.is_k3:
        # s4 shifts by c1.d + r*d^2/2; the K3 lattice is even
        assert (v.r * dd) % 2 == 0
        return MukaiVector(v.r, c1, v.s + v.c1.dot(d) + v.r * dd // 2)
    num = v.r * (dd - d.dot(v.model.canonical))
    assert num % 2 == 0  # D.(D-K) is even
    return MukaiVector(v.r, c1, v.s + v.c1.dot(d) + num // 2)


def euler_form(v: MukaiVector, w: MukaiVector) -> int:
    """(v, w) = chi(v . w), computed by Riemann-Roch as ground truth.

    On K3 models this equals -<v, w*>; orthogonality (v, w) = 0 is therefore
    the same condition as <v, w*> = 0, which is the form actually used.
    """
    return chi_vec(mukai_tensor(v, w))


def euler_pair_hom(v: MukaiVector, w: MukaiVector) -> int:
    """chi(v, w) = sum (-1)^i ext^i(v, w), the asymmetric Hom-pairing.

    Equals -<v, w> on K3 models; on the general model it carries the
    antisymmetric canonical-class correction.
    """
    v._require_same(w)
    k = v.model.canonical
    return (
        v.r * chi_vec(w)
        + w.r * chi_vec(v)
        - v.r * w.r * v.model.chi_o
        - v.c1.dot(w.c1)
        + w.r * v.c1.dot(k)
    )


def moduli_dim(v: MukaiVector) -> int:
    """Expected dimension of the moduli space of stable sheaves of class v.

    Computed as 2*r*c2 - (r-1)*c1^2 - (r^2-1)*chi(O), which on K3 models
    collapses to <v, v> + 2.
    """
    c1sq = v.c1.dot(v.c1)
    c2 = Fraction(c1sq, 2) - ch2(v)
    dim = 2 * v.r * c2 - (v.r - 1) * c1sq - (v.r * v.r - 1) * v.model.chi_o
    assert dim.denominator == 1
    return int(dim)


def normalized_vector(r: int, a: int, model: SurfaceModel) -> MukaiVector:
    """The rank-r vector of the normalized 2a-dimensional moduli space.

    c1 = sigma + (a - r(r-1)chi/2).f with chi(v) = 1; the rank-1 member is
    the class of I_Z(sigma + a.f).
    """
    if r < 1:
        raise ValueError("rank must be >= 1")
    if a < 0:
        raise ValueError("half-dimension must be >= 0")
    if not model.is_elliptic:
        raise ModelMismatchError("normalized vectors live on the elliptic models")
    half = r * (r - 1) * model.chi_o
    assert half % 2 == 0
    c1 = model.cls(1, a - half // 2)
    if model.kind == ELLIPTIC_K3:
        return MukaiVector(r, c1, 1 - r)
    return MukaiVector(r, c1, 1)


def sign_law_sweep(model: SurfaceModel, bound: int) -> tuple[int, list, dict]:
    """Exhaustively compare chi(v . w) with -<v, w*> on a coordinate grid.

    Runs over all vectors with coordinates in [-bound, bound] on a K3 model
    (unordered pairs; both forms are symmetric).  The two sides are computed
    through their separate formulas: the tensor-product route and the
    pairing-with-dual route.  Returns (pairs checked, mismatches, an example
    record of the sign discrepancy between the two raw conventions at
    (v(O), v(O))).

    The loop works on plain integer tuples for speed; tests spot-check it
    against the object-level euler_form/mukai_pair on samples.
    """
    if not model.is_k3:
        raise ModelMismatchError("the sign law is a statement about the K3 models")
    rng = range(-bound, bound + 1)
    if model.kind == ELLIPTIC_K3:
        vecs = [(r, x, y, s) for r in rng for x in rng for y in rng for s in rng]

        def dot(a, b):
            return -2 * a[1] * b[1] + a[1] * b[2] + a[2] * b[1]

    else:
        h2 = model.degree
        vecs = [(r, x, 0, s) for r in rng for x in rng for s in rng]

        def dot(a, b):
            return h2 * a[1] * b[1]

    mismatches = []
    checked = 0
    n = len(vecs)
    for i in range(n):
        v = vecs[i]
        r1, s1 = v[0], v[3]
        chi1 = r1 + s1
        for j in range(i, n):
            w = vecs[j]
            r2, s2 = w[0], w[3]
            d = dot(v, w)
            # tensor route: chi of the product by Riemann-Roch
            lhs = r1 * (r2 + s2) + r2 * chi1 + d - 2 * r1 * r2
            # pairing route: -<v, w*> = c1.c1' + r1 s2 + s1 r2
            rhs = d + r1 * s2 + s1 * r2
            checked += 1
            if lhs != rhs:
                mismatches.append((v, w, lhs, rhs))
    o = structure_vector(model)
    discrepancy = {
        "euler_form(vO, vO)": euler_form(o, o),
        "<vO, vO_dual>": mukai_pair(o, mukai_dual(o)),
    }
    return checked, mismatches, discrepancy
